#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mmot {

inline constexpr double kMassTolerance = 1e-9;
inline constexpr double kAtomTolerance = 1e-12;
inline constexpr std::size_t kDefaultEntryCap = 10'000'000;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

enum class AtomKind { Scalar, Planar, Label };

const char* to_string(AtomKind kind);
AtomKind atom_kind_from_string(const std::string& name);

// A point of a finite sample space. Numeric atoms compare equal within
// kAtomTolerance per coordinate; labels compare exactly and only carry
// meaning through an external cost lookup.
class Atom {
 public:
  static Atom scalar(double x) { return Atom(x); }
  static Atom planar(double x, double y) { return Atom(Point2{x, y}); }
  static Atom label(std::string name) { return Atom(std::move(name)); }

  AtomKind kind() const;
  double as_scalar() const;
  Point2 as_point() const;  // scalars are embedded as (x, 0)
  const std::string& as_label() const;

  friend bool operator==(const Atom& a, const Atom& b);

 private:
  explicit Atom(double x) : payload_(x) {}
  explicit Atom(Point2 p) : payload_(p) {}
  explicit Atom(std::string s) : payload_(std::move(s)) {}

  std::variant<double, Point2, std::string> payload_;
};

// Euclidean distance between numeric atoms. Labels have no intrinsic
// geometry and raise InvalidArgument.
double euclidean(const Atom& a, const Atom& b);

// Masses over an indexed list of pairwise distinct atoms.
class DiscreteDistribution {
 public:
  // Strictly positive masses summing to one within kMassTolerance; sums that
  // are off by less than the tolerance are renormalized.
  DiscreteDistribution(std::vector<Atom> atoms, std::vector<double> masses);

  // Same as the constructor but admits zero masses.
  static DiscreteDistribution relaxed(std::vector<Atom> atoms, std::vector<double> masses);
  static DiscreteDistribution uniform(std::vector<Atom> atoms);
  static DiscreteDistribution point_mass(Atom atom);
  // Uniform weight per sample; samples that compare equal are merged into one
  // atom carrying the summed mass. Atom order follows first occurrence.
  static DiscreteDistribution from_samples(const std::vector<Atom>& samples);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& masses() const { return masses_; }
  const Atom& atom(std::size_t s) const { return atoms_[s]; }
  double mass(std::size_t s) const { return masses_[s]; }

  // Index of an atom equal to `a`, or size() when absent.
  std::size_t find(const Atom& a) const;

 private:
  DiscreteDistribution(std::vector<Atom> atoms, std::vector<double> masses, bool allow_zero);

  std::vector<Atom> atoms_;
  std::vector<double> masses_;
};

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::vector<std::size_t> row_major_strides(const Shape& shape);

// Dense real tensor in row-major order.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Shape shape, double fill = 0.0,
                       std::size_t entry_cap = kDefaultEntryCap);
  DenseTensor(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double operator[](std::size_t flat) const { return data_[flat]; }
  double& operator[](std::size_t flat) { return data_[flat]; }
  double at(std::span<const std::size_t> index) const { return data_[flat_index(index)]; }
  double& at(std::span<const std::size_t> index) { return data_[flat_index(index)]; }
  double at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }

  std::size_t flat_index(std::span<const std::size_t> index) const;

 private:
  Shape shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> data_;
};

// Walks a multi-index over `shape` in row-major order. Returns false once
// the walk wraps around.
bool next_index(std::vector<std::size_t>& index, const Shape& shape);

// Probability mass over a product of finite sample spaces.
class JointMass {
 public:
  // Entries must be nonnegative (values above -1e-10 are clamped to zero)
  // and sum to one within kMassTolerance.
  JointMass(Shape shape, std::vector<double> entries);

  static JointMass product(const std::vector<std::vector<double>>& factors);

  const Shape& shape() const { return tensor_.shape(); }
  std::size_t rank() const { return tensor_.rank(); }
  std::size_t size() const { return tensor_.size(); }
  const DenseTensor& tensor() const { return tensor_; }
  std::span<const double> entries() const { return tensor_.data(); }
  double at(std::initializer_list<std::size_t> index) const { return tensor_.at(index); }

 private:
  DenseTensor tensor_;
};

// q^{i|k}: column t is the law of axis i given the pivot coordinate t.
class ConditionalMass {
 public:
  ConditionalMass(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t s, std::size_t t) const { return entries_[s * cols_ + t]; }
  std::span<const double> entries() const { return entries_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

// Sum over s of A_s^ell * B_s.
double braket(const DenseTensor& a, const DenseTensor& b, int ell);

// Sums out every axis not in `keep_axes`. Kept axes appear in ascending order.
JointMass marginal(const JointMass& joint, std::vector<std::size_t> keep_axes);

// Conditional of axis 0 given axis 1 of a two-axis joint.
ConditionalMass conditional(const JointMass& joint);

// Joint mass on num_axes axes where every non-pivot coordinate is drawn
// independently given the pivot:
//   p(s_1..s_n) = q(s_k) * prod_{i != k} q^{i|k}(s_i | s_k).
JointMass glue(std::span<const double> pivot_masses,
               const std::map<std::size_t, ConditionalMass>& conditionals,
               std::size_t pivot, std::size_t num_axes);

}  // namespace mmot
