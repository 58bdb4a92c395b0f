#pragma once

// Conforming multi-patch domains. Interfaces identify whole faces; the
// control points along an identified face must be bit-equal in both
// patches, which the builders guarantee by sharing the exact values.

#include <array>
#include <cstdint>
#include <vector>

#include "splinemove/errors.hpp"
#include "splinemove/patch.hpp"

namespace splinemove {

/// What a face of a patch means in the physical problem.
enum class FaceRole {
  kFree,           // nothing special
  kInnerBoundary,  // moving interface (structure side)
  kOuterWall,      // fixed far-field boundary
  kInterface       // glued to a neighbouring patch
};

/// Identification of face (dir_a, side_a) of patch_a with face
/// (dir_b, side_b) of patch_b. `reversed` flips the single running
/// direction (2D). Faces must carry matching knot vectors.
struct Interface {
  int patch_a = 0, dir_a = 0, side_a = 0;
  int patch_b = 0, dir_b = 0, side_b = 0;
  bool reversed = false;
};

/// Face index on a 2D patch: 2*dir + side.
inline constexpr int face_id(int dir, int side) { return 2 * dir + side; }

struct MultiPatchDomain {
  std::vector<TensorPatch> patches;
  std::vector<Interface> interfaces;
  /// Per patch, per face (2*dir+side): role of that face.
  std::vector<std::array<FaceRole, 4>> face_roles;
  /// Extension patches that are rebuilt by copy, never re-optimized.
  std::vector<bool> frozen;

  int num_patches() const { return static_cast<int>(patches.size()); }

  std::array<FaceRole, 4> roles_of(int patch) const {
    if (face_roles.empty()) return {FaceRole::kFree, FaceRole::kFree, FaceRole::kFree, FaceRole::kFree};
    return face_roles[static_cast<size_t>(patch)];
  }

  /// Largest distance between identified control points (0 for a
  /// bit-exactly conforming domain).
  double conformity_error() const {
    double worst = 0.0;
    for (const auto& itf : interfaces) {
      const auto& A = patches[static_cast<size_t>(itf.patch_a)];
      const auto& B = patches[static_cast<size_t>(itf.patch_b)];
      auto ia = A.face_indices(itf.dir_a, itf.side_a);
      auto ib = B.face_indices(itf.dir_b, itf.side_b);
      if (ia.size() != ib.size())
        throw interface_error("conformity: face control counts differ");
      if (itf.reversed) std::reverse(ib.begin(), ib.end());
      for (size_t k = 0; k < ia.size(); ++k) {
        const double d = (A.points().row(ia[k]) - B.points().row(ib[k])).norm();
        if (d > worst) worst = d;
      }
    }
    return worst;
  }

  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& p : patches) {
      const std::uint64_t ph = p.content_hash();
      const unsigned char* b = reinterpret_cast<const unsigned char*>(&ph);
      for (size_t i = 0; i < sizeof(ph); ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
      }
    }
    return h;
  }
};

/// Shared coefficient numbering across patch interfaces. The owner of an
/// identified set is the entry with the lowest patch index (then lowest
/// local index).
struct GlobalIndex {
  std::vector<std::vector<int>> local_to_global;  // per patch
  std::vector<std::pair<int, int>> owner;         // global -> (patch, local)
  int size = 0;
};

/// Build the shared numbering for per-patch control nets `nets` (one
/// indexer per patch; usually the geometry space, but any conforming
/// per-patch space works).
inline GlobalIndex build_global_index(const std::vector<TensorIndexer>& nets,
                                      const std::vector<Interface>& interfaces) {
  auto face_of = [](const TensorIndexer& ix, int dir, int side) {
    const int fixed = side == 0 ? 0 : ix.dims[static_cast<size_t>(dir)] - 1;
    std::vector<int> out;
    const int total = ix.size() / ix.dims[static_cast<size_t>(dir)];
    std::vector<int> idx(ix.dims.size(), 0);
    for (int c = 0; c < total; ++c) {
      int rem = c;
      for (size_t a = 0; a < ix.dims.size(); ++a) {
        if (static_cast<int>(a) == dir) continue;
        idx[a] = rem % ix.dims[a];
        rem /= ix.dims[a];
      }
      idx[static_cast<size_t>(dir)] = fixed;
      out.push_back(ix.flat(idx));
    }
    return out;
  };

  // union-find over (patch, local) pairs, flattened
  std::vector<int> offset(nets.size() + 1, 0);
  for (size_t p = 0; p < nets.size(); ++p)
    offset[p + 1] = offset[p] + nets[p].size();
  std::vector<int> parent(static_cast<size_t>(offset.back()));
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);  // keep the smallest id as representative
    parent[static_cast<size_t>(b)] = a;
  };

  for (const auto& itf : interfaces) {
    auto ia = face_of(nets[static_cast<size_t>(itf.patch_a)], itf.dir_a, itf.side_a);
    auto ib = face_of(nets[static_cast<size_t>(itf.patch_b)], itf.dir_b, itf.side_b);
    if (ia.size() != ib.size())
      throw interface_error("global index: face control counts differ");
    if (itf.reversed) std::reverse(ib.begin(), ib.end());
    for (size_t k = 0; k < ia.size(); ++k)
      unite(offset[static_cast<size_t>(itf.patch_a)] + ia[k],
            offset[static_cast<size_t>(itf.patch_b)] + ib[k]);
  }

  GlobalIndex gi;
  std::vector<int> rep_to_global(parent.size(), -1);
  gi.local_to_global.resize(nets.size());
  for (size_t p = 0; p < nets.size(); ++p)
    gi.local_to_global[p].resize(static_cast<size_t>(nets[p].size()));
  for (size_t p = 0; p < nets.size(); ++p) {
    for (int i = 0; i < nets[p].size(); ++i) {
      const int r = find(offset[p] + i);
      if (rep_to_global[static_cast<size_t>(r)] < 0) {
        rep_to_global[static_cast<size_t>(r)] = gi.size++;
        // representative is the smallest flattened id == lowest patch owner
        int op = 0;
        while (offset[static_cast<size_t>(op + 1)] <= r) ++op;
        gi.owner.emplace_back(op, r - offset[static_cast<size_t>(op)]);
      }
      gi.local_to_global[p][static_cast<size_t>(i)] = rep_to_global[static_cast<size_t>(r)];
    }
  }
  return gi;
}

}  // namespace splinemove
