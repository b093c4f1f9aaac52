#ifndef GATGRAD_TEST_SUPPORT_HPP
#define GATGRAD_TEST_SUPPORT_HPP

#include <filesystem>
#include <string>

#include "gatgrad/fd_oracle.hpp"
#include "gatgrad/generate.hpp"

namespace gatgrad::testing {

/// Scratch directory unique to the running test, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

/// Instance with n nodes, every node fed by every other node in index order.
Instance dense_instance(std::size_t n, std::size_t feature_dim, std::size_t out_dim, std::uint64_t seed);

/// Random instance with sizes drawn from the acceptance ranges:
/// n in [3, 8], H in [1, 4], D in [1, 4], slope 0.2, min_degree 0.
Instance acceptance_instance(std::uint64_t seed);

/// Standard normal vector from its own generator.
Vector normal_vector(std::size_t size, std::uint64_t seed);

/// Largest |x - y| over every entry of two gradient sets.
double max_abs_diff(const GradientSet& x, const GradientSet& y);

/// |fd - analytic| for one parameter entry at a ladder of halving steps.
struct ConvergenceSample {
    ParamBlock block;
    std::size_t index;
    std::vector<double> errors;  // one per step, largest step first
};

/// Runs central differences at each step and keeps the entries that are
/// smooth along the whole ladder: never kink-flagged (guard = 4 x largest
/// step) and with error at the smallest step at least 100x the roundoff
/// estimate eps * |L| / step.
std::vector<ConvergenceSample> fd_error_ladder(const Instance& inst, NodeId target, const Vector& g,
                                               const std::vector<double>& steps);

}  // namespace gatgrad::testing

#endif  // GATGRAD_TEST_SUPPORT_HPP
