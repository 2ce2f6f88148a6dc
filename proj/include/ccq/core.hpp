#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ccq {

using Label = std::uint8_t;
inline constexpr int kMaxLabels = 255;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Finite weighted domain; point ids are the indices 0..n-1. */
class Domain {
public:
    Domain() = default;
    explicit Domain(std::vector<double> weights);
    static Domain uniform(std::size_t n);

    std::size_t size() const { return weights_.size(); }
    double weight(std::size_t x) const { return weights_[x]; }
    std::span<const double> weights() const { return weights_; }
    bool is_uniform() const { return uniform_; }

    bool operator==(const Domain& o) const { return weights_ == o.weights_; }

private:
    std::vector<double> weights_;
    bool uniform_ = false;
};

struct Hypothesis {
    std::vector<Label> labels;

    Label operator()(std::size_t x) const { return labels[x]; }
    std::size_t size() const { return labels.size(); }
    bool operator==(const Hypothesis&) const = default;
};

/** Row-major |H| x n label matrix. Rows are distinct. */
class HypothesisSpace {
public:
    HypothesisSpace(int k, std::size_t n, std::vector<Label> flat,
                    std::optional<int> natarajan_dim = std::nullopt);
    HypothesisSpace(int k, const std::vector<Hypothesis>& hs,
                    std::optional<int> natarajan_dim = std::nullopt);

    int k() const { return k_; }
    std::size_t domain_size() const { return n_; }
    std::size_t size() const { return count_; }
    std::span<const Label> row(std::size_t i) const { return {flat_.data() + i * n_, n_}; }
    Label label(std::size_t i, std::size_t x) const { return flat_[i * n_ + x]; }
    Hypothesis hypothesis(std::size_t i) const;
    std::span<const Label> flat() const { return flat_; }

    std::optional<int> natarajan_dim() const { return dim_; }
    void set_natarajan_dim(std::optional<int> d) { dim_ = d; }

    /** Subspace made of the given rows, in the given order. */
    HypothesisSpace subset(std::span<const std::size_t> rows) const;
    /** Index of the row equal to h, if present. */
    std::optional<std::size_t> find(std::span<const Label> h) const;

private:
    int k_;
    std::size_t n_;
    std::size_t count_;
    std::vector<Label> flat_;
    std::optional<int> dim_;
};

/** (position in drawn sequence, label) pairs; positions are unique. */
class LabeledSample {
public:
    struct Entry {
        std::size_t position;
        Label label;
        bool operator==(const Entry&) const = default;
    };

    void add(std::size_t position, Label label) { entries_.push_back({position, label}); }
    void append(const LabeledSample& other);
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<Entry>& entries() const { return entries_; }
    void reserve(std::size_t n) { entries_.reserve(n); }
    /** Throws if a position repeats. */
    void check_unique() const;
    void sort_by_position();

private:
    std::vector<Entry> entries_;
};

/** Fraction of entries (position p, y) with h(points[p]) != y. */
double empirical_error(std::span<const Label> h, const LabeledSample& sample,
                       std::span<const std::uint32_t> points);

double class_distance(std::span<const Label> h, std::span<const Label> g, const Domain& dom);

/** Most frequent label among rows of V at x; ties go to the smallest label. */
Label plurality_vote(const HypothesisSpace& V, std::size_t x);
Label plurality_vote(const HypothesisSpace& V, std::span<const std::size_t> alive, std::size_t x);
Hypothesis plurality_hypothesis(const HypothesisSpace& V, std::span<const std::size_t> alive);
Hypothesis plurality_hypothesis(const HypothesisSpace& V);

/** Greedy cover: first uncovered row becomes a center. Returns center row indices. */
std::vector<std::size_t> greedy_cover_indices(const HypothesisSpace& space, const Domain& dom,
                                              double eps);
HypothesisSpace epsilon_cover(const HypothesisSpace& space, const Domain& dom, double eps);

struct NatarajanGuard {
    std::size_t max_domain = 20;
    std::size_t max_space = 4096;
};

int natarajan_dimension(const HypothesisSpace& space, const Domain& dom,
                        NatarajanGuard guard = {});

/** Known dimension if attached, otherwise brute force under the default guard. */
int dimension_of(const HypothesisSpace& space, const Domain& dom);

void check_same_domain(const HypothesisSpace& space, const Domain& dom);

}  // namespace ccq
