#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrflow/phase.hpp"
#include "lrflow/system.hpp"

namespace lrflow {

Layout& Layout::add_frame(std::string name, int n) {
  frames_.push_back({std::move(name), n});
  return *this;
}

Layout& Layout::add_block(std::string name, BlockKind kind, int n, int size) {
  blocks_.push_back({std::move(name), kind, n, size_, size});
  size_ += size;
  return *this;
}

Layout& Layout::add_skew(std::string name, int n) {
  return add_block(std::move(name), BlockKind::kSkew, n, bivector_dim(n));
}

Layout& Layout::add_vector(std::string name, int n) {
  return add_block(std::move(name), BlockKind::kVector, n, n);
}

Layout& Layout::add_unit_vector(std::string name, int n) {
  return add_block(std::move(name), BlockKind::kUnitVector, n, n);
}

Layout& Layout::add_scalar(std::string name) {
  return add_block(std::move(name), BlockKind::kScalar, 1, 1);
}

const Block& Layout::block(std::string_view name) const {
  auto it = std::find_if(blocks_.begin(), blocks_.end(),
                         [&](const Block& b) { return b.name == name; });
  if (it == blocks_.end()) throw std::out_of_range("Layout: no block named " + std::string(name));
  return *it;
}

std::vector<std::string> Layout::column_names() const {
  std::vector<std::string> names;
  for (const FrameBlock& f : frames_) {
    for (int i = 1; i <= f.n; ++i) {
      for (int j = 1; j <= f.n; ++j) {
        names.push_back(f.name + "_" + std::to_string(i) + std::to_string(j));
      }
    }
  }
  for (const Block& b : blocks_) {
    switch (b.kind) {
      case BlockKind::kSkew:
        for (int i = 1; i <= b.n; ++i) {
          for (int j = i + 1; j <= b.n; ++j) {
            names.push_back(b.name + "_" + std::to_string(i) + std::to_string(j));
          }
        }
        break;
      case BlockKind::kVector:
      case BlockKind::kUnitVector:
        for (int i = 1; i <= b.n; ++i) names.push_back(b.name + "_" + std::to_string(i));
        break;
      case BlockKind::kScalar:
        names.push_back(b.name);
        break;
    }
  }
  return names;
}

Eigen::VectorXd Layout::flatten(const PhasePoint& x) const {
  check(x);
  int total = size_;
  for (const FrameBlock& f : frames_) total += f.n * f.n;
  Eigen::VectorXd out(total);
  int k = 0;
  for (const Eigen::MatrixXd& g : x.frames) {
    for (int i = 0; i < g.rows(); ++i) {
      for (int j = 0; j < g.cols(); ++j) out(k++) = g(i, j);
    }
  }
  out.tail(size_) = x.coords;
  return out;
}

void Layout::check(const PhasePoint& x) const {
  if (x.frames.size() != frames_.size()) {
    throw DimensionError("PhasePoint: expected " + std::to_string(frames_.size()) + " frames, got " +
                         std::to_string(x.frames.size()));
  }
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (x.frames[i].rows() != frames_[i].n || x.frames[i].cols() != frames_[i].n) {
      throw DimensionError("PhasePoint: frame " + frames_[i].name + " has wrong shape");
    }
  }
  require_same_dimension(static_cast<int>(x.coords.size()), size_, "PhasePoint coordinates");
}

void Layout::normalize_units(PhasePoint& x) const {
  for (const Block& b : blocks_) {
    if (b.kind != BlockKind::kUnitVector) continue;
    auto seg = x.coords.segment(b.offset, b.size);
    const double norm = seg.norm();
    if (norm > 0.0) seg /= norm;
  }
}

PhasePoint advance_linear(const PhasePoint& x, const PhaseRate& rate, double h) {
  PhasePoint out{x.frames, x.coords + h * rate.coords};
  for (std::size_t i = 0; i < out.frames.size(); ++i) {
    out.frames[i] += h * (x.frames[i] * rate.frame_velocity[i]);
  }
  return out;
}

PhaseRate scaled(const PhaseRate& rate, double s) {
  PhaseRate out{rate.frame_velocity, s * rate.coords};
  for (Eigen::MatrixXd& v : out.frame_velocity) v *= s;
  return out;
}

std::vector<std::string> System::quantity_names() const {
  return {"energy", "constraints"};
}

Eigen::VectorXd System::quantity(std::string_view name, const PhasePoint& x) const {
  if (name == "energy") return Eigen::VectorXd::Constant(1, energy(x));
  if (name == "constraints") {
    const std::vector<NamedValue> r = constraint_residuals(x);
    Eigen::VectorXd out(static_cast<Eigen::Index>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) out(static_cast<Eigen::Index>(i)) = r[i].value;
    return out;
  }
  throw std::invalid_argument("quantity '" + std::string(name) + "' is not defined for system " +
                              kind());
}

void System::validate(const PhasePoint& x) const {
  layout_.check(x);
  for (const NamedValue& r : constraint_residuals(x)) {
    if (!(std::abs(r.value) <= kStateTolerance)) throw ConstraintViolation(r.name, r.value);
  }
}

}  // namespace lrflow
