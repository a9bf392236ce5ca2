#include "mmot/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mmot/error.hpp"

namespace mmot {

namespace {

bool close(double a, double b) { return std::abs(a - b) <= kAtomTolerance; }

// Validates a mass vector and renormalizes it if the sum is within tolerance.
void check_masses(std::vector<double>& masses, bool allow_zero, const char* what) {
  double total = 0.0;
  for (std::size_t s = 0; s < masses.size(); ++s) {
    const double m = masses[s];
    if (!std::isfinite(m)) throw InvalidArgument(std::string(what) + ": non-finite mass");
    if (allow_zero ? m < 0.0 : m <= 0.0) {
      std::ostringstream msg;
      msg << what << ": mass at index " << s << " is " << m
          << (allow_zero ? " (must be >= 0)" : " (must be > 0)");
      throw InvalidArgument(msg.str());
    }
    total += m;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": masses sum to " << total << ", expected 1";
    throw InvalidArgument(msg.str());
  }
  for (double& m : masses) m /= total;
}

}  // namespace

const char* to_string(AtomKind kind) {
  switch (kind) {
    case AtomKind::Scalar: return "scalar";
    case AtomKind::Planar: return "planar";
    case AtomKind::Label: return "label";
  }
  return "?";
}

AtomKind atom_kind_from_string(const std::string& name) {
  if (name == "scalar") return AtomKind::Scalar;
  if (name == "planar") return AtomKind::Planar;
  if (name == "label") return AtomKind::Label;
  throw InvalidArgument("unknown atom kind '" + name + "'");
}

AtomKind Atom::kind() const {
  switch (payload_.index()) {
    case 0: return AtomKind::Scalar;
    case 1: return AtomKind::Planar;
    default: return AtomKind::Label;
  }
}

double Atom::as_scalar() const {
  if (const auto* x = std::get_if<double>(&payload_)) return *x;
  throw InvalidArgument("atom is not a scalar");
}

Point2 Atom::as_point() const {
  if (const auto* p = std::get_if<Point2>(&payload_)) return *p;
  if (const auto* x = std::get_if<double>(&payload_)) return {*x, 0.0};
  throw InvalidArgument("label atom has no coordinates");
}

const std::string& Atom::as_label() const {
  if (const auto* s = std::get_if<std::string>(&payload_)) return *s;
  throw InvalidArgument("atom is not a label");
}

bool operator==(const Atom& a, const Atom& b) {
  if (a.payload_.index() != b.payload_.index()) return false;
  switch (a.payload_.index()) {
    case 0: return close(std::get<0>(a.payload_), std::get<0>(b.payload_));
    case 1: {
      const Point2& p = std::get<1>(a.payload_);
      const Point2& q = std::get<1>(b.payload_);
      return close(p.x, q.x) && close(p.y, q.y);
    }
    default: return std::get<2>(a.payload_) == std::get<2>(b.payload_);
  }
}

double euclidean(const Atom& a, const Atom& b) {
  if (a.kind() == AtomKind::Scalar && b.kind() == AtomKind::Scalar)
    return std::abs(a.as_scalar() - b.as_scalar());
  const Point2 p = a.as_point();
  const Point2 q = b.as_point();
  return std::hypot(p.x - q.x, p.y - q.y);
}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms, std::vector<double> masses)
    : DiscreteDistribution(std::move(atoms), std::move(masses), false) {}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms, std::vector<double> masses,
                                           bool allow_zero)
    : atoms_(std::move(atoms)), masses_(std::move(masses)) {
  if (atoms_.empty()) throw InvalidArgument("distribution: no atoms");
  if (atoms_.size() != masses_.size())
    throw InvalidArgument("distribution: atom and mass counts differ");
  check_masses(masses_, allow_zero, "distribution");
  for (std::size_t s = 0; s < atoms_.size(); ++s)
    for (std::size_t t = s + 1; t < atoms_.size(); ++t)
      if (atoms_[s] == atoms_[t]) {
        std::ostringstream msg;
        msg << "distribution: atoms " << s << " and " << t << " are equal";
        throw InvalidArgument(msg.str());
      }
}

DiscreteDistribution DiscreteDistribution::relaxed(std::vector<Atom> atoms,
                                                   std::vector<double> masses) {
  return DiscreteDistribution(std::move(atoms), std::move(masses), true);
}

DiscreteDistribution DiscreteDistribution::uniform(std::vector<Atom> atoms) {
  const std::size_t m = atoms.size();
  if (m == 0) throw InvalidArgument("distribution: no atoms");
  return DiscreteDistribution(std::move(atoms), std::vector<double>(m, 1.0 / double(m)));
}

DiscreteDistribution DiscreteDistribution::point_mass(Atom atom) {
  return DiscreteDistribution({std::move(atom)}, {1.0});
}

DiscreteDistribution DiscreteDistribution::from_samples(const std::vector<Atom>& samples) {
  if (samples.empty()) throw InvalidArgument("distribution: no samples");
  std::vector<Atom> atoms;
  std::vector<double> counts;
  for (const Atom& a : samples) {
    auto it = std::find(atoms.begin(), atoms.end(), a);
    if (it == atoms.end()) {
      atoms.push_back(a);
      counts.push_back(1.0);
    } else {
      counts[std::size_t(it - atoms.begin())] += 1.0;
    }
  }
  for (double& c : counts) c /= double(samples.size());
  return DiscreteDistribution(std::move(atoms), std::move(counts));
}

std::size_t DiscreteDistribution::find(const Atom& a) const {
  return std::size_t(std::find(atoms_.begin(), atoms_.end(), a) - atoms_.begin());
}

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::vector<std::size_t> row_major_strides(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t a = shape.size(); a-- > 1;) strides[a - 1] = strides[a] * shape[a];
  return strides;
}

namespace {

void check_shape(const Shape& shape, std::size_t entry_cap) {
  if (shape.empty()) throw InvalidArgument("tensor: empty shape");
  double total = 1.0;
  for (std::size_t d : shape) {
    if (d == 0) throw InvalidArgument("tensor: zero-length axis");
    total *= double(d);
  }
  if (total > double(entry_cap)) {
    std::ostringstream msg;
    msg << "tensor: product space has " << total << " entries, above the cap of " << entry_cap
        << "; use fewer marginals or fewer atoms per marginal";
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

DenseTensor::DenseTensor(Shape shape, double fill, std::size_t entry_cap)
    : shape_(std::move(shape)) {
  check_shape(shape_, entry_cap);
  strides_ = row_major_strides(shape_);
  data_.assign(shape_size(shape_), fill);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_, kDefaultEntryCap);
  if (data_.size() != shape_size(shape_))
    throw InvalidArgument("tensor: entry count does not match shape");
  strides_ = row_major_strides(shape_);
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw InvalidArgument("tensor: index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < index.size(); ++a) {
    if (index[a] >= shape_[a]) throw InvalidArgument("tensor: index out of range");
    flat += index[a] * strides_[a];
  }
  return flat;
}

bool next_index(std::vector<std::size_t>& index, const Shape& shape) {
  for (std::size_t a = shape.size(); a-- > 0;) {
    if (++index[a] < shape[a]) return true;
    index[a] = 0;
  }
  return false;
}

JointMass::JointMass(Shape shape, std::vector<double> entries) {
  for (double& e : entries) {
    if (!std::isfinite(e)) throw InvalidArgument("joint mass: non-finite entry");
    if (e < 0.0) {
      if (e < -1e-10) throw InvalidArgument("joint mass: negative entry");
      e = 0.0;
    }
  }
  check_masses(entries, true, "joint mass");
  tensor_ = DenseTensor(std::move(shape), std::move(entries));
}

JointMass JointMass::product(const std::vector<std::vector<double>>& factors) {
  if (factors.empty()) throw InvalidArgument("joint mass: no factors");
  Shape shape;
  for (const auto& f : factors) shape.push_back(f.size());
  std::vector<double> entries(shape_size(shape));
  std::vector<std::size_t> idx(shape.size(), 0);
  std::size_t flat = 0;
  do {
    double v = 1.0;
    for (std::size_t a = 0; a < shape.size(); ++a) v *= factors[a][idx[a]];
    entries[flat++] = v;
  } while (next_index(idx, shape));
  return JointMass(std::move(shape), std::move(entries));
}

ConditionalMass::ConditionalMass(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0 || entries_.size() != rows_ * cols_)
    throw InvalidArgument("conditional mass: shape mismatch");
  for (std::size_t t = 0; t < cols_; ++t) {
    double col = 0.0;
    for (std::size_t s = 0; s < rows_; ++s) {
      const double v = entries_[s * cols_ + t];
      if (!(v >= 0.0)) throw InvalidArgument("conditional mass: negative or NaN entry");
      col += v;
    }
    if (std::abs(col - 1.0) > kMassTolerance) {
      std::ostringstream msg;
      msg << "conditional mass: column " << t << " sums to " << col;
      throw InvalidArgument(msg.str());
    }
  }
}

double braket(const DenseTensor& a, const DenseTensor& b, int ell) {
  if (a.shape() != b.shape()) throw InvalidArgument("braket: shape mismatch");
  if (ell < 1) throw InvalidArgument("braket: exponent must be a positive integer");
  double sum = 0.0;
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t s = 0; s < ad.size(); ++s) {
    double p = ad[s];
    for (int e = 1; e < ell; ++e) p *= ad[s];
    sum += p * bd[s];
  }
  return sum;
}

JointMass marginal(const JointMass& joint, std::vector<std::size_t> keep_axes) {
  if (keep_axes.empty()) throw InvalidArgument("marginal: no axes to keep");
  std::sort(keep_axes.begin(), keep_axes.end());
  if (std::adjacent_find(keep_axes.begin(), keep_axes.end()) != keep_axes.end())
    throw InvalidArgument("marginal: repeated axis");
  if (keep_axes.back() >= joint.rank()) throw InvalidArgument("marginal: axis out of range");

  const Shape& shape = joint.shape();
  Shape out_shape;
  for (std::size_t a : keep_axes) out_shape.push_back(shape[a]);
  const auto out_strides = row_major_strides(out_shape);

  std::vector<double> out(shape_size(out_shape), 0.0);
  std::vector<std::size_t> idx(shape.size(), 0);
  const auto entries = joint.entries();
  std::size_t flat = 0;
  do {
    std::size_t o = 0;
    for (std::size_t k = 0; k < keep_axes.size(); ++k) o += idx[keep_axes[k]] * out_strides[k];
    out[o] += entries[flat++];
  } while (next_index(idx, shape));
  return JointMass(std::move(out_shape), std::move(out));
}

ConditionalMass conditional(const JointMass& joint) {
  if (joint.rank() != 2) throw InvalidArgument("conditional: expects a two-axis joint mass");
  const std::size_t rows = joint.shape()[0];
  const std::size_t cols = joint.shape()[1];
  const auto e = joint.entries();
  std::vector<double> q(rows * cols);
  for (std::size_t t = 0; t < cols; ++t) {
    double col = 0.0;
    for (std::size_t s = 0; s < rows; ++s) col += e[s * cols + t];
    if (col <= 0.0) {
      std::ostringstream msg;
      msg << "conditional: conditioning marginal is zero at index " << t;
      throw InvalidArgument(msg.str());
    }
    for (std::size_t s = 0; s < rows; ++s) q[s * cols + t] = e[s * cols + t] / col;
  }
  return ConditionalMass(rows, cols, std::move(q));
}

JointMass glue(std::span<const double> pivot_masses,
               const std::map<std::size_t, ConditionalMass>& conditionals, std::size_t pivot,
               std::size_t num_axes) {
  if (pivot >= num_axes) throw InvalidArgument("glue: pivot axis out of range");
  if (conditionals.size() + 1 != num_axes)
    throw InvalidArgument("glue: need one conditional per non-pivot axis");
  Shape shape(num_axes, 0);
  shape[pivot] = pivot_masses.size();
  for (const auto& [axis, q] : conditionals) {
    if (axis >= num_axes || axis == pivot)
      throw InvalidArgument("glue: conditional attached to an invalid axis");
    if (q.cols() != pivot_masses.size())
      throw InvalidArgument("glue: conditional does not condition on the pivot space");
    shape[axis] = q.rows();
  }

  std::vector<double> entries(shape_size(shape));
  std::vector<std::size_t> idx(num_axes, 0);
  std::size_t flat = 0;
  do {
    const std::size_t t = idx[pivot];
    double v = pivot_masses[t];
    for (const auto& [axis, q] : conditionals) v *= q(idx[axis], t);
    entries[flat++] = v;
  } while (next_index(idx, shape));
  return JointMass(std::move(shape), std::move(entries));
}

}  // namespace mmot
