#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlbi {

/** @brief Identifier of a database object. */
using ObjectId = std::uint64_t;

/// Thrown for malformed arguments: dimension mismatches, empty inputs, bad counts.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A dataset record could not be parsed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A record parsed but violates a data invariant (e.g. weights not normalized).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tolerance on the weight-sum invariant of a stored distribution.
inline constexpr double kWeightSumTolerance = 1e-9;

/// Largest weight-sum deviation accepted (and silently rescaled) without the
/// explicit renormalize option.
inline constexpr double kIngestSumTolerance = 1e-6;

enum class Normalization {
    Strict,      ///< reject weight sums off by more than kIngestSumTolerance
    Renormalize  ///< rescale any positive weight sum to one
};

/**
 * @brief Weighted point set in R^d: n bin locations with probability weights.
 *
 * Bins are stored row-major. Construction validates the weights, merges bins
 * with identical coordinates and rescales the weights so they sum to one
 * (weights already summing to one within kWeightSumTolerance are kept as given).
 */
class DiscreteDistribution {
public:
    DiscreteDistribution(ObjectId id, std::size_t dim, std::vector<double> coords,
                         std::vector<double> weights,
                         Normalization mode = Normalization::Strict);

    ObjectId id() const noexcept { return id_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return weights_.size(); }

    std::span<const double> bin(std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    std::span<const double> coords() const noexcept { return coords_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Copy with a different id; used when queries are drawn from a corpus.
    DiscreteDistribution with_id(ObjectId id) const;

    friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

private:
    ObjectId id_;
    std::size_t dim_;
    std::vector<double> coords_;
    std::vector<double> weights_;
};

/// L2 distance between two bins.
double ground_distance(std::span<const double> a, std::span<const double> b);

}  // namespace nlbi
