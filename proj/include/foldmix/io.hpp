#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "foldmix/data.hpp"
#include "foldmix/diagnostics.hpp"
#include "foldmix/simulation.hpp"

namespace foldmix {

// Input-file problems (bad schema, bad values); carries row/column context
// and maps to exit code 2 in the CLI.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-notation, locale-independent rendering that parses back to the
// value within 5e-13; identical inputs always produce identical bytes.
std::string format_double(double v);

// ---- dataset CSV -----------------------------------------------------
// Header: subject_id,exposure,time,z,dropout_cause
// Rows are long format, one observation per row, each subject's rows
// ordered by time starting at 0. dropout_cause may be repeated on every
// row, given on any subset of a subject's rows, or omitted entirely for
// completers.

void write_dataset_csv(const std::string& path, const LongitudinalDataset& data);

// K: number of measurement times; 0 infers max observed time + 1.
LongitudinalDataset read_dataset_csv(const std::string& path, int K = 0);

// Removes the t = 0 row of every subject and shifts times down by one
// (for change-from-baseline data where the baseline row is structurally
// zero). Subjects left without observations are removed; returns how many.
int drop_baseline_rows(LongitudinalDataset& data);

// ---- fit outputs -------------------------------------------------------

struct QuantityReport {
    std::string name;
    PosteriorSummary summary;
    RhatResult rhat;
    double ess = 0.0;
};

std::vector<QuantityReport> report_quantities(const std::vector<ChainOutput>& chains);

void write_summary_csv(const std::string& path, const std::vector<QuantityReport>& rows);
void write_acceptance_csv(const std::string& path, const std::vector<ChainOutput>& chains);
void write_draws_csv(const std::string& path, const std::vector<ChainOutput>& chains);

// ---- study outputs -------------------------------------------------------

void write_run_records_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_run_records_csv(const std::string& path);
void write_study_table_csv(const std::string& path, const std::vector<StudyCell>& cells);

}  // namespace foldmix
