#pragma once

#include <string>
#include <vector>

namespace foldmix {

enum class ExposureGroup : int { unexposed = 0, exposed = 1 };

inline int group_index(ExposureGroup g) { return static_cast<int>(g); }

// One magnitude measurement at integer time t (t_k = k-1 grid).
struct Observation {
    int time;
    double z;
};

// Last observed time D and dropout cause: 0 completer, 1 recovery-type,
// 2 death-type. delta = 0 iff D = K-1.
struct DropoutRecord {
    int last_time = 0;
    int cause = 0;
};

struct SubjectData {
    std::string id;
    ExposureGroup group = ExposureGroup::unexposed;
    std::vector<Observation> observations;
    DropoutRecord dropout;
};

struct LongitudinalDataset {
    int n_times = 0;  // K
    std::vector<SubjectData> subjects;
};

// Throws std::invalid_argument naming the subject and field on violation:
// at least one observation per subject, contiguous times from 0, z >= 0,
// observations end exactly at the dropout time, cause/K consistency.
void validate_dataset(const LongitudinalDataset& data);

}  // namespace foldmix
