#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mcvar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Input data violates a documented precondition (bad file, bad prices,
/// constant series, too-short sample, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent or out-of-range options.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: singular regressions, indefinite matrices,
/// diverging iterations.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A series identifier together with its commodity-type tag.
struct SeriesInfo {
    std::string id;
    std::string type;

    friend bool operator==(const SeriesInfo&, const SeriesInfo&) = default;
};

}  // namespace mcvar
