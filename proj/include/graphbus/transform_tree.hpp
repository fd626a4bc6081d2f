#pragma once

#include <Eigen/Dense>

#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphbus/errors.hpp"

namespace graphbus {

class ParameterStore;

/// Rigid body transform as a 4x4 homogeneous matrix. The stored matrix maps
/// child-frame point coordinates into the parent frame: p_parent = T * p_child.
class RigidTransform {
 public:
  static constexpr double kOrthoTolerance = 1e-9;

  /// Identity.
  RigidTransform() : m_(Eigen::Matrix4d::Identity()) {}

  /// Validates the rigid-transform invariants: R orthonormal within 1e-9,
  /// det(R) = +1 within 1e-9, bottom row exactly [0,0,0,1].
  /// Throws Error(invalid_transform) otherwise.
  static RigidTransform from_matrix(const Eigen::Matrix4d& m);

  static RigidTransform from_parts(const Eigen::Matrix3d& rotation,
                                   const Eigen::Vector3d& translation);

  /// Row-major 16-element array, as stored in config files and the C API.
  static RigidTransform from_row_major(const double values[16]);
  void to_row_major(double out[16]) const;

  static bool is_valid(const Eigen::Matrix4d& m,
                       double tolerance = kOrthoTolerance);

  const Eigen::Matrix4d& matrix() const noexcept { return m_; }
  Eigen::Matrix3d rotation() const { return m_.block<3, 3>(0, 0); }
  Eigen::Vector3d translation() const { return m_.block<3, 1>(0, 3); }

  /// Exact rigid inverse: [R t]⁻¹ = [Rᵀ, -Rᵀ t].
  RigidTransform inverse() const;

  RigidTransform operator*(const RigidTransform& rhs) const;

  Eigen::Vector3d apply(const Eigen::Vector3d& point) const;

  /// Snaps the rotation block to the nearest orthonormal matrix (polar
  /// decomposition via SVD); counters drift after long chain products.
  RigidTransform orthonormalized() const;

 private:
  struct Unchecked {};
  RigidTransform(const Eigen::Matrix4d& m, Unchecked) : m_(m) {}

  Eigen::Matrix4d m_;
};

/// Rooted forest of named coordinate frames with a rigid transform on every
/// parent->child edge. lookup(src, dst) walks both frames to their lowest
/// common ancestor and composes the edge matrices along the two chains.
///
/// Frame names follow the channel-name rules; a leading "/" is allowed and
/// significant. Concurrent lookups are permitted; set_transform excludes
/// lookups while it mutates.
class FrameTree {
 public:
  /// Stores or updates the parent->child edge; unknown frames are created.
  /// Throws Error(cycle) when child is an ancestor of parent, Error(reparent)
  /// when child already has a different parent (detach first), and
  /// Error(invalid_channel/...) for bad frame names.
  void set_transform(const std::string& parent, const std::string& child,
                     const RigidTransform& child_to_parent);

  /// Removes the child's parent edge; the subtree rooted at child remains.
  void detach(const std::string& child);

  /// T such that p_dst = T * p_src. Computed as
  /// inverse(chain(dst->ancestor)) * chain(src->ancestor).
  /// Throws Error(unknown_frame) or Error(disconnected_frames).
  RigidTransform lookup(const std::string& src, const std::string& dst) const;

  /// Deepest frame lying on both root paths.
  std::string lowest_common_ancestor(const std::string& a,
                                     const std::string& b) const;

  bool has_frame(const std::string& name) const;
  std::vector<std::string> frames() const;
  std::size_t size() const;

  /// Loads edges from the parameter entry
  ///   transforms: [{parent, child, matrix: [16 row-major numbers]}, ...]
  /// Missing key is a no-op; malformed entries throw Error(config_parse).
  void load_from_params(const ParameterStore& params);

 private:
  struct Node {
    std::string name;
    std::optional<std::size_t> parent;
    RigidTransform to_parent;
  };

  // Renormalize the rotation block after chains longer than this.
  static constexpr std::size_t kRenormalizeChainLength = 32;

  std::size_t intern(const std::string& name);
  std::optional<std::size_t> index_of(const std::string& name) const;
  std::vector<std::size_t> path_to_root(std::size_t node) const;
  std::size_t require(const std::string& name) const;

  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Node> nodes_;
};

}  // namespace graphbus
