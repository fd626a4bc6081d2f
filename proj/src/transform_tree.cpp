#include "graphbus/transform_tree.hpp"

#include <algorithm>
#include <mutex>

#include "graphbus/channel.hpp"
#include "graphbus/params.hpp"

namespace graphbus {

bool RigidTransform::is_valid(const Eigen::Matrix4d& m, double tolerance) {
  if (m(3, 0) != 0.0 || m(3, 1) != 0.0 || m(3, 2) != 0.0 || m(3, 3) != 1.0) {
    return false;
  }
  Eigen::Matrix3d r = m.block<3, 3>(0, 0);
  if (((r.transpose() * r) - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff() > tolerance) {
    return false;
  }
  if (std::abs(r.determinant() - 1.0) > tolerance) return false;
  return true;
}

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m) {
  if (!is_valid(m)) {
    raise(Errc::invalid_transform,
          "matrix is not a rigid transform (rotation block must be "
          "orthonormal with det +1 and bottom row [0,0,0,1])");
  }
  return RigidTransform(m, Unchecked{});
}

RigidTransform RigidTransform::from_parts(const Eigen::Matrix3d& rotation,
                                          const Eigen::Vector3d& translation) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<3, 3>(0, 0) = rotation;
  m.block<3, 1>(0, 3) = translation;
  return from_matrix(m);
}

RigidTransform RigidTransform::from_row_major(const double values[16]) {
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = values[r * 4 + c];
  return from_matrix(m);
}

void RigidTransform::to_row_major(double out[16]) const {
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r * 4 + c] = m_(r, c);
}

RigidTransform RigidTransform::inverse() const {
  Eigen::Matrix3d rt = m_.block<3, 3>(0, 0).transpose();
  Eigen::Matrix4d inv = Eigen::Matrix4d::Identity();
  inv.block<3, 3>(0, 0) = rt;
  inv.block<3, 1>(0, 3) = -rt * m_.block<3, 1>(0, 3);
  return RigidTransform(inv, Unchecked{});
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
  Eigen::Matrix4d m = m_ * rhs.m_;
  m.row(3) << 0, 0, 0, 1;  // keep the bottom row exact
  return RigidTransform(m, Unchecked{});
}

Eigen::Vector3d RigidTransform::apply(const Eigen::Vector3d& point) const {
  return m_.block<3, 3>(0, 0) * point + m_.block<3, 1>(0, 3);
}

RigidTransform RigidTransform::orthonormalized() const {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      m_.block<3, 3>(0, 0), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<3, 3>(0, 0) = r;
  m.block<3, 1>(0, 3) = m_.block<3, 1>(0, 3);
  return RigidTransform(m, Unchecked{});
}

namespace {

void validate_frame_name(const std::string& name) {
  if (ChannelId::validate(name) != Errc::ok) {
    raise(Errc::invalid_channel,
          "invalid frame name '" + name +
              "': frame names follow channel-name rules");
  }
}

}  // namespace

std::size_t FrameTree::intern(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  nodes_.push_back(Node{name, std::nullopt, RigidTransform{}});
  index_.emplace(name, nodes_.size() - 1);
  return nodes_.size() - 1;
}

std::optional<std::size_t> FrameTree::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FrameTree::require(const std::string& name) const {
  auto idx = index_of(name);
  if (!idx) {
    raise(Errc::unknown_frame, "unknown frame '" + name + "'");
  }
  return *idx;
}

std::vector<std::size_t> FrameTree::path_to_root(std::size_t node) const {
  std::vector<std::size_t> path{node};
  while (nodes_[path.back()].parent) {
    path.push_back(*nodes_[path.back()].parent);
  }
  return path;
}

void FrameTree::set_transform(const std::string& parent,
                              const std::string& child,
                              const RigidTransform& child_to_parent) {
  validate_frame_name(parent);
  validate_frame_name(child);
  if (parent == child) {
    raise(Errc::cycle, "frame '" + child + "' cannot be its own parent");
  }
  std::unique_lock lock(mu_);
  std::size_t p = intern(parent);
  std::size_t c = intern(child);
  if (nodes_[c].parent && *nodes_[c].parent != p) {
    raise(Errc::reparent,
          "frame '" + child + "' already has parent '" +
              nodes_[*nodes_[c].parent].name + "'; detach it first");
  }
  // Walk up from parent: finding child there would close a cycle.
  for (std::size_t cur = p;;) {
    if (cur == c) {
      raise(Errc::cycle, "edge " + parent + " -> " + child +
                             " would create a cycle");
    }
    if (!nodes_[cur].parent) break;
    cur = *nodes_[cur].parent;
  }
  nodes_[c].parent = p;
  nodes_[c].to_parent = child_to_parent;
}

void FrameTree::detach(const std::string& child) {
  std::unique_lock lock(mu_);
  std::size_t c = require(child);
  nodes_[c].parent = std::nullopt;
  nodes_[c].to_parent = RigidTransform{};
}

std::string FrameTree::lowest_common_ancestor(const std::string& a,
                                              const std::string& b) const {
  std::shared_lock lock(mu_);
  std::size_t ia = require(a);
  std::size_t ib = require(b);
  auto pa = path_to_root(ia);
  auto pb = path_to_root(ib);
  if (pa.back() != pb.back()) {
    raise(Errc::disconnected_frames,
          "frames '" + a + "' and '" + b + "' share no common ancestor");
  }
  // Paths end at the same root; descend while they agree.
  std::size_t lca = pa.back();
  auto ita = pa.rbegin();
  auto itb = pb.rbegin();
  while (ita != pa.rend() && itb != pb.rend() && *ita == *itb) {
    lca = *ita;
    ++ita;
    ++itb;
  }
  return nodes_[lca].name;
}

RigidTransform FrameTree::lookup(const std::string& src,
                                 const std::string& dst) const {
  std::shared_lock lock(mu_);
  std::size_t isrc = require(src);
  std::size_t idst = require(dst);
  auto psrc = path_to_root(isrc);
  auto pdst = path_to_root(idst);
  if (psrc.back() != pdst.back()) {
    raise(Errc::disconnected_frames,
          "frames '" + src + "' and '" + dst + "' share no common ancestor");
  }
  std::size_t common = 0;  // length of the shared suffix ending at the root
  while (common < psrc.size() && common < pdst.size() &&
         psrc[psrc.size() - 1 - common] == pdst[pdst.size() - 1 - common]) {
    ++common;
  }
  const std::size_t src_hops = psrc.size() - common;  // src -> ancestor
  const std::size_t dst_hops = pdst.size() - common;  // dst -> ancestor

  // chain(x -> ancestor) maps x coordinates into ancestor coordinates:
  // the product of to_parent matrices applied bottom-up.
  RigidTransform anc_from_src;
  for (std::size_t i = src_hops; i-- > 0;) {
    anc_from_src = anc_from_src * nodes_[psrc[i]].to_parent;
  }
  RigidTransform anc_from_dst;
  for (std::size_t i = dst_hops; i-- > 0;) {
    anc_from_dst = anc_from_dst * nodes_[pdst[i]].to_parent;
  }
  RigidTransform result = anc_from_dst.inverse() * anc_from_src;
  if (src_hops + dst_hops > kRenormalizeChainLength) {
    result = result.orthonormalized();
  }
  return result;
}

bool FrameTree::has_frame(const std::string& name) const {
  std::shared_lock lock(mu_);
  return index_.contains(name);
}

std::vector<std::string> FrameTree::frames() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back(n.name);
  return out;
}

std::size_t FrameTree::size() const {
  std::shared_lock lock(mu_);
  return nodes_.size();
}

void FrameTree::load_from_params(const ParameterStore& params) {
  auto entry = params.get("transforms");
  if (!entry) return;
  if (entry->kind() != ParamValue::Kind::list) {
    raise(Errc::config_parse, "'transforms' must be a list");
  }
  for (const auto& item : entry->as_list()) {
    const ParamValue* parent = item.find("parent");
    const ParamValue* child = item.find("child");
    const ParamValue* matrix = item.find("matrix");
    if (!parent || !child || !matrix) {
      raise(Errc::config_parse,
            "each transforms entry needs parent, child and matrix");
    }
    if (matrix->kind() != ParamValue::Kind::list ||
        matrix->as_list().size() != 16) {
      raise(Errc::config_parse,
            "transforms matrix must hold 16 row-major numbers");
    }
    double values[16];
    for (std::size_t i = 0; i < 16; ++i) {
      const ParamValue& v = matrix->as_list()[i];
      if (v.kind() == ParamValue::Kind::integer) {
        values[i] = static_cast<double>(v.as_int());
      } else {
        values[i] = v.as_double();
      }
    }
    set_transform(parent->as_string(), child->as_string(),
                  RigidTransform::from_row_major(values));
  }
}

}  // namespace graphbus
