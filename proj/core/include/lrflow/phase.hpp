#pragma once

// Phase-space plumbing shared by every system: a state is a list of frames
// (matrices evolving by g' = g xi) plus a flat coordinate vector whose blocks
// are described by a Layout.

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lrflow/liecore.hpp"

namespace lrflow {

struct PhasePoint {
  std::vector<Eigen::MatrixXd> frames;
  Eigen::VectorXd coords;
};

/// Time derivative of a PhasePoint. frame_velocity[i] is the skew matrix xi
/// with d/dt frames[i] = frames[i] * xi.
struct PhaseRate {
  std::vector<Eigen::MatrixXd> frame_velocity;
  Eigen::VectorXd coords;
};

enum class BlockKind { kSkew, kVector, kUnitVector, kScalar };

struct Block {
  std::string name;
  BlockKind kind;
  int n;       // ambient dimension (1 for scalars)
  int offset;  // into PhasePoint::coords
  int size;
};

struct FrameBlock {
  std::string name;
  int n;
};

class Layout {
 public:
  Layout& add_frame(std::string name, int n);
  Layout& add_skew(std::string name, int n);
  Layout& add_vector(std::string name, int n);
  Layout& add_unit_vector(std::string name, int n);
  Layout& add_scalar(std::string name);

  int coord_size() const { return size_; }
  const std::vector<FrameBlock>& frames() const { return frames_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  /// Throws std::out_of_range for an unknown name.
  const Block& block(std::string_view name) const;

  /// Column names in flatten() order: frame entries row-major as g_11, g_12,
  /// ...; skew blocks by upper-triangle pair as omega_12; vectors as p_1.
  std::vector<std::string> column_names() const;
  Eigen::VectorXd flatten(const PhasePoint& x) const;

  /// Checks frame count/shape and coordinate length.
  void check(const PhasePoint& x) const;

  /// Renormalizes unit-vector blocks in place.
  void normalize_units(PhasePoint& x) const;

 private:
  Layout& add_block(std::string name, BlockKind kind, int n, int size);

  std::vector<FrameBlock> frames_;
  std::vector<Block> blocks_;
  int size_ = 0;
};

inline SkewMatrix skew_block(const PhasePoint& x, const Block& b) {
  return SkewMatrix::from_coords(b.n, x.coords.segment(b.offset, b.size));
}

inline Eigen::VectorXd vector_block(const PhasePoint& x, const Block& b) {
  return x.coords.segment(b.offset, b.size);
}

/// x + h * rate, frames advanced additively (g + h g xi). Used for RK stages
/// and finite differences; no projection.
PhasePoint advance_linear(const PhasePoint& x, const PhaseRate& rate, double h);

PhaseRate scaled(const PhaseRate& rate, double s);

}  // namespace lrflow
