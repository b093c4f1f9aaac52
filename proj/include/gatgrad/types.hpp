#ifndef GATGRAD_TYPES_HPP
#define GATGRAD_TYPES_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gatgrad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using NodeId = std::size_t;

/// Raised for malformed inputs: bad shapes, out-of-range ids, non-finite values.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace gatgrad

#endif  // GATGRAD_TYPES_HPP
