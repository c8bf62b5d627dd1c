#ifndef SING_SAS_H
#define SING_SAS_H

#include "strips_task.h"

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sing {
inline constexpr int ANY_VALUE = -1;

struct SasVariable {
    std::string name;
    std::vector<std::string> value_names;

    int domain_size() const {
        return static_cast<int>(value_names.size());
    }
};

// One (variable, pre, post) tuple; a prevail condition has pre == post.
struct SasEffect {
    int var;
    int pre;
    int post;
};

struct SasOperator {
    std::string name;
    std::vector<SasEffect> effects;
};

using SasFact = std::pair<int, int>;

struct SasTask {
    std::vector<SasVariable> variables;
    std::vector<std::vector<SasFact>> mutex_groups;
    std::vector<SasOperator> operators;
    std::vector<int> init;
    std::vector<SasFact> goal;
    bool use_metric = false;
};

class SasFormatError : public std::runtime_error {
public:
    SasFormatError(const std::string &message, int line);
};

// Reads the Fast Downward translator output format, version 3.
SasTask read_sas(std::string_view text);

/*
  One fact per (variable, value). The returned task keeps the variable map
  so that multivalued encodings and goal completion can use it.
*/
StripsTask sas_to_strips(const SasTask &task);
}

#endif
