#include "foldmix/data.hpp"

#include <cmath>
#include <stdexcept>

namespace foldmix {

void validate_dataset(const LongitudinalDataset& data) {
    if (data.n_times < 1) throw std::invalid_argument("dataset: K must be >= 1");
    for (const auto& s : data.subjects) {
        const std::string where = "subject '" + s.id + "': ";
        if (s.observations.empty())
            throw std::invalid_argument(where + "needs at least one observation");
        for (std::size_t k = 0; k < s.observations.size(); ++k) {
            const auto& o = s.observations[k];
            if (o.time != static_cast<int>(k))
                throw std::invalid_argument(where + "times must be contiguous from 0 (got " +
                                            std::to_string(o.time) + " at position " +
                                            std::to_string(k) + ")");
            if (!(o.z >= 0.0) || !std::isfinite(o.z))
                throw std::invalid_argument(where + "magnitude must be finite and >= 0");
        }
        const int last = s.observations.back().time;
        if (last >= data.n_times)
            throw std::invalid_argument(where + "observation time exceeds K-1");
        if (s.dropout.last_time != last)
            throw std::invalid_argument(where + "dropout time disagrees with last observation");
        if (s.dropout.cause < 0 || s.dropout.cause > 2)
            throw std::invalid_argument(where + "dropout cause must be 0, 1 or 2");
        if (s.dropout.cause == 0 && last != data.n_times - 1)
            throw std::invalid_argument(where + "completer must be observed through K-1");
        if (s.dropout.cause != 0 && last > data.n_times - 2)
            throw std::invalid_argument(where + "dropout must occur before K-1");
    }
}

}  // namespace foldmix
