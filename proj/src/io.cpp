#include "foldmix/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "foldmix/model.hpp"

namespace foldmix {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, long line_no, const std::string& column) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw SchemaError("line " + std::to_string(line_no) + ", column '" + column +
                          "': cannot parse number from '" + s + "'");
    return v;
}

long parse_long(const std::string& s, long line_no, const std::string& column) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw SchemaError("line " + std::to_string(line_no) + ", column '" + column +
                          "': cannot parse integer from '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s, long line_no, const std::string& column) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw SchemaError("line " + std::to_string(line_no) + ", column '" + column +
                          "': cannot parse unsigned integer from '" + s + "'");
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);  // binary: no platform newline surprises
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

std::string sanitize_message(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 12);
    std::string s(buf, res.ptr);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

void write_dataset_csv(const std::string& path, const LongitudinalDataset& data) {
    std::ofstream f = open_out(path);
    f << "subject_id,exposure,time,z,dropout_cause\n";
    for (const auto& s : data.subjects) {
        for (const auto& o : s.observations) {
            f << s.id << ',' << group_index(s.group) << ',' << o.time << ','
              << format_double(o.z) << ',' << s.dropout.cause << '\n';
        }
    }
}

LongitudinalDataset read_dataset_csv(const std::string& path, int K) {
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open dataset: " + path);

    std::string line;
    if (!std::getline(f, line)) throw SchemaError(path + ": empty file");
    const auto header = split_csv_line(line);
    std::map<std::string, int> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = static_cast<int>(i);
    for (const char* required : {"subject_id", "exposure", "time", "z"})
        if (!col.count(required))
            throw SchemaError(path + ": missing required column '" + std::string(required) + "'");
    const int cause_col = col.count("dropout_cause") ? col["dropout_cause"] : -1;

    LongitudinalDataset ds;
    std::map<std::string, int> subj_index;
    std::vector<std::optional<int>> subj_cause;
    long line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        auto field = [&](int idx, const char* name) -> const std::string& {
            if (idx < 0 || idx >= static_cast<int>(fields.size()))
                throw SchemaError("line " + std::to_string(line_no) + ": missing column '" +
                                  name + "'");
            return fields[idx];
        };

        const std::string id = field(col["subject_id"], "subject_id");
        if (id.empty())
            throw SchemaError("line " + std::to_string(line_no) + ": empty subject_id");
        const long exposure = parse_long(field(col["exposure"], "exposure"), line_no, "exposure");
        if (exposure != 0 && exposure != 1)
            throw SchemaError("line " + std::to_string(line_no) +
                              ", column 'exposure': must be 0 or 1");
        const long t = parse_long(field(col["time"], "time"), line_no, "time");
        const double z = parse_double(field(col["z"], "z"), line_no, "z");
        if (!(z >= 0.0) || !std::isfinite(z))
            throw SchemaError("line " + std::to_string(line_no) +
                              ", column 'z': magnitude must be finite and >= 0");

        auto it = subj_index.find(id);
        if (it == subj_index.end()) {
            it = subj_index.emplace(id, static_cast<int>(ds.subjects.size())).first;
            SubjectData s;
            s.id = id;
            s.group = exposure == 0 ? ExposureGroup::unexposed : ExposureGroup::exposed;
            ds.subjects.push_back(std::move(s));
            subj_cause.emplace_back();
        }
        SubjectData& subj = ds.subjects[it->second];
        if (group_index(subj.group) != exposure)
            throw SchemaError("line " + std::to_string(line_no) +
                              ", column 'exposure': subject '" + id + "' changes exposure");
        const int expected = static_cast<int>(subj.observations.size());
        if (t != expected)
            throw SchemaError("line " + std::to_string(line_no) + ", column 'time': subject '" +
                              id + "' expects time " + std::to_string(expected) + ", got " +
                              std::to_string(t));
        subj.observations.push_back({static_cast<int>(t), z});

        if (cause_col >= 0 && cause_col < static_cast<int>(fields.size()) &&
            !fields[cause_col].empty()) {
            const long cause = parse_long(fields[cause_col], line_no, "dropout_cause");
            if (cause < 0 || cause > 2)
                throw SchemaError("line " + std::to_string(line_no) +
                                  ", column 'dropout_cause': must be 0, 1 or 2");
            auto& known = subj_cause[it->second];
            if (known && *known != cause)
                throw SchemaError("line " + std::to_string(line_no) +
                                  ", column 'dropout_cause': subject '" + id +
                                  "' has conflicting causes");
            known = static_cast<int>(cause);
        }
    }
    if (ds.subjects.empty()) throw SchemaError(path + ": no data rows");

    int max_time = 0;
    for (const auto& s : ds.subjects)
        max_time = std::max(max_time, s.observations.back().time);
    ds.n_times = K > 0 ? K : max_time + 1;

    for (std::size_t i = 0; i < ds.subjects.size(); ++i) {
        SubjectData& s = ds.subjects[i];
        const int last = s.observations.back().time;
        s.dropout.last_time = last;
        if (subj_cause[i]) {
            s.dropout.cause = *subj_cause[i];
        } else if (last == ds.n_times - 1) {
            s.dropout.cause = 0;  // completer inferred from full follow-up
        } else {
            throw SchemaError("subject '" + s.id + "': dropout_cause required (last time " +
                              std::to_string(last) + " < K-1 = " +
                              std::to_string(ds.n_times - 1) + ")");
        }
    }
    try {
        validate_dataset(ds);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    return ds;
}

int drop_baseline_rows(LongitudinalDataset& data) {
    int removed = 0;
    std::vector<SubjectData> kept;
    for (auto& s : data.subjects) {
        if (s.observations.size() <= 1) {
            ++removed;
            continue;
        }
        s.observations.erase(s.observations.begin());
        for (auto& o : s.observations) --o.time;
        --s.dropout.last_time;
        kept.push_back(std::move(s));
    }
    data.subjects = std::move(kept);
    --data.n_times;
    return removed;
}

std::vector<QuantityReport> report_quantities(const std::vector<ChainOutput>& chains) {
    std::vector<QuantityReport> rows;
    if (chains.empty()) return rows;
    for (const auto& name : chains.front().quantity_names) {
        QuantityReport r;
        r.name = name;
        r.summary = summarize(chains, name);
        r.rhat = chains.size() >= 2 ? split_rhat(chains, name) : RhatResult{1.0, false};
        r.ess = effective_sample_size(chains, name);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_summary_csv(const std::string& path, const std::vector<QuantityReport>& rows) {
    std::ofstream f = open_out(path);
    f << "quantity,mean,median,sd,q2.5,q97.5,rhat,rhat_defined,ess,n_draws\n";
    for (const auto& r : rows) {
        f << r.name << ',' << format_double(r.summary.mean) << ','
          << format_double(r.summary.median) << ',' << format_double(r.summary.sd) << ','
          << format_double(r.summary.q025) << ',' << format_double(r.summary.q975) << ','
          << format_double(r.rhat.value) << ',' << (r.rhat.defined ? 1 : 0) << ','
          << format_double(r.ess) << ',' << r.summary.n << '\n';
    }
}

void write_acceptance_csv(const std::string& path, const std::vector<ChainOutput>& chains) {
    std::ofstream f = open_out(path);
    f << "chain,block,rate\n";
    for (const auto& c : chains)
        for (const auto& b : c.acceptance)
            f << c.chain_index << ',' << b.name << ',' << format_double(b.rate) << '\n';
}

void write_draws_csv(const std::string& path, const std::vector<ChainOutput>& chains) {
    std::ofstream f = open_out(path);
    f << "chain,iteration";
    if (!chains.empty())
        for (const auto& name : chains.front().quantity_names) f << ',' << name;
    f << '\n';
    for (const auto& c : chains) {
        const std::size_t n = c.draws.empty() ? 0 : c.draws.front().size();
        for (std::size_t i = 0; i < n; ++i) {
            f << c.chain_index << ',' << i;
            for (const auto& q : c.draws) f << ',' << format_double(q[i]);
            f << '\n';
        }
    }
}

void write_run_records_csv(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream f = open_out(path);
    f << "scenario_index,model,run_index,seed,ok,mean,median,sd,q2.5,q97.5,n_draws,"
         "rhat_ad,violations,nonfinite,error\n";
    for (const auto& r : records) {
        f << r.scenario_index << ',' << variant_name(r.model) << ',' << r.run_index << ','
          << r.seed << ',' << (r.ok ? 1 : 0) << ',' << format_double(r.ad.mean) << ','
          << format_double(r.ad.median) << ',' << format_double(r.ad.sd) << ','
          << format_double(r.ad.q025) << ',' << format_double(r.ad.q975) << ',' << r.ad.n << ','
          << format_double(r.rhat_ad) << ',' << r.violations << ',' << r.nonfinite << ','
          << sanitize_message(r.error) << '\n';
    }
}

std::vector<RunRecord> read_run_records_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError("cannot open run records: " + path);
    std::string line;
    if (!std::getline(f, line)) throw SchemaError(path + ": empty file");
    std::vector<RunRecord> out;
    long line_no = 1;
    while (std::getline(f, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 15)
            throw SchemaError("line " + std::to_string(line_no) + ": expected 15 columns");
        RunRecord r;
        r.scenario_index = static_cast<int>(parse_long(fields[0], line_no, "scenario_index"));
        const auto mv = variant_from_name(fields[1]);
        if (!mv) throw SchemaError("line " + std::to_string(line_no) + ": bad model name");
        r.model = *mv;
        r.run_index = static_cast<int>(parse_long(fields[2], line_no, "run_index"));
        r.seed = parse_u64(fields[3], line_no, "seed");
        r.ok = parse_long(fields[4], line_no, "ok") != 0;
        r.ad.mean = parse_double(fields[5], line_no, "mean");
        r.ad.median = parse_double(fields[6], line_no, "median");
        r.ad.sd = parse_double(fields[7], line_no, "sd");
        r.ad.q025 = parse_double(fields[8], line_no, "q2.5");
        r.ad.q975 = parse_double(fields[9], line_no, "q97.5");
        r.ad.n = parse_long(fields[10], line_no, "n_draws");
        r.rhat_ad = parse_double(fields[11], line_no, "rhat_ad");
        r.violations = parse_long(fields[12], line_no, "violations");
        r.nonfinite = parse_long(fields[13], line_no, "nonfinite");
        r.error = fields[14];
        out.push_back(std::move(r));
    }
    return out;
}

void write_study_table_csv(const std::string& path, const std::vector<StudyCell>& cells) {
    std::ofstream f = open_out(path);
    f << "Model,sigma,omega,TAD,Bias,Mean,Median,SD,SE,Q2.5,Q97.5,MSE,NRuns,NFailed,"
         "RhatWarnings,Violations,Valid\n";
    for (const auto& c : cells) {
        f << variant_name(c.model) << ',' << format_double(c.sigma) << ','
          << format_double(c.omega) << ',' << format_double(c.tad) << ','
          << format_double(c.bias) << ',' << format_double(c.avg_mean) << ','
          << format_double(c.avg_median) << ',' << format_double(c.avg_sd) << ','
          << format_double(c.emp_se) << ',' << format_double(c.avg_q025) << ','
          << format_double(c.avg_q975) << ',' << format_double(c.mse) << ',' << c.n_runs << ','
          << c.n_failed << ',' << c.n_rhat_warn << ',' << c.violations << ','
          << (c.valid ? 1 : 0) << '\n';
    }
}

}  // namespace foldmix
