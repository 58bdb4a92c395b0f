#pragma once

// Tensor-product NURBS patch over [0,1]^d with exact refinement surgery.
//
// Control points are stored lexicographically with the first parametric
// index running fastest. All knot surgery happens in homogeneous
// coordinates, so rational patches refine exactly too.

#include <Eigen/Dense>
#include <cstdint>
#include <numeric>
#include <vector>

#include "splinemove/errors.hpp"
#include "splinemove/knots.hpp"

namespace splinemove {

/// Multi-index bookkeeping for lexicographic (first-fastest) storage.
struct TensorIndexer {
  std::vector<int> dims;

  int size() const {
    int s = 1;
    for (int d : dims) s *= d;
    return s;
  }
  int flat(const std::vector<int>& idx) const {
    int f = 0;
    for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a)
      f = f * dims[static_cast<size_t>(a)] + idx[static_cast<size_t>(a)];
    return f;
  }
  std::vector<int> unflat(int f) const {
    std::vector<int> idx(dims.size());
    for (size_t a = 0; a < dims.size(); ++a) {
      idx[a] = f % dims[a];
      f /= dims[a];
    }
    return idx;
  }
};

class TensorPatch {
 public:
  TensorPatch() = default;
  TensorPatch(std::vector<KnotVector> kvs, Eigen::MatrixXd points,
              Eigen::VectorXd weights)
      : kvs_(std::move(kvs)), pts_(std::move(points)), wts_(std::move(weights)) {
    validate();
  }
  TensorPatch(std::vector<KnotVector> kvs, Eigen::MatrixXd points)
      : kvs_(std::move(kvs)), pts_(std::move(points)) {
    wts_ = Eigen::VectorXd::Ones(pts_.rows());
    validate();
  }

  /// Patch whose control points sit on the Greville lattice of an axis-
  /// aligned rectangle; by linear precision it reproduces the affine map
  /// [0,1]^2 -> [x0,x1] x [y0,y1] exactly.
  static TensorPatch rectangle(const KnotVector& k1, const KnotVector& k2,
                               double x0, double y0, double x1, double y1) {
    const auto g1 = k1.greville();
    const auto g2 = k2.greville();
    Eigen::MatrixXd P(g1.size() * g2.size(), 2);
    int r = 0;
    for (int j = 0; j < g2.size(); ++j)
      for (int i = 0; i < g1.size(); ++i, ++r)
        P.row(r) << x0 + (x1 - x0) * g1[i], y0 + (y1 - y0) * g2[j];
    return TensorPatch({k1, k2}, std::move(P));
  }

  int dim() const { return static_cast<int>(kvs_.size()); }
  const std::vector<KnotVector>& knot_vectors() const { return kvs_; }
  const KnotVector& kv(int dir) const { return kvs_[static_cast<size_t>(dir)]; }
  const Eigen::MatrixXd& points() const { return pts_; }
  Eigen::MatrixXd& points() { return pts_; }
  const Eigen::VectorXd& weights() const { return wts_; }
  int num_points() const { return static_cast<int>(pts_.rows()); }
  bool is_rational() const {
    return (wts_.array() != wts_[0]).any() || wts_[0] != 1.0;
  }

  TensorIndexer indexer() const {
    TensorIndexer ix;
    for (const auto& k : kvs_) ix.dims.push_back(k.size());
    return ix;
  }

  /// Map a control index to its Greville parametric location.
  std::vector<double> greville_point(int flat) const {
    const auto idx = indexer().unflat(flat);
    std::vector<double> g(kvs_.size());
    for (size_t a = 0; a < kvs_.size(); ++a) g[a] = kvs_[a].greville()[idx[a]];
    return g;
  }

  bool is_boundary_index(int flat) const {
    const auto idx = indexer().unflat(flat);
    for (size_t a = 0; a < kvs_.size(); ++a)
      if (idx[a] == 0 || idx[a] == kvs_[a].size() - 1) return true;
    return false;
  }

  std::vector<int> boundary_indices() const {
    std::vector<int> out;
    const int n = num_points();
    for (int i = 0; i < n; ++i)
      if (is_boundary_index(i)) out.push_back(i);
    return out;
  }
  std::vector<int> interior_indices() const {
    std::vector<int> out;
    const int n = num_points();
    for (int i = 0; i < n; ++i)
      if (!is_boundary_index(i)) out.push_back(i);
    return out;
  }

  /// Control indices of one face, ordered by the running directions
  /// (first-fastest). 2D faces: dir selects the frozen direction,
  /// side 0/1 the end.
  std::vector<int> face_indices(int dir, int side) const {
    auto ix = indexer();
    const int fixed = side == 0 ? 0 : ix.dims[static_cast<size_t>(dir)] - 1;
    std::vector<int> out;
    std::vector<int> idx(kvs_.size(), 0);
    // iterate over the remaining directions, first-fastest
    const int total = ix.size() / ix.dims[static_cast<size_t>(dir)];
    for (int c = 0; c < total; ++c) {
      int rem = c;
      for (size_t a = 0; a < kvs_.size(); ++a) {
        if (static_cast<int>(a) == dir) continue;
        idx[a] = rem % ix.dims[a];
        rem /= ix.dims[a];
      }
      idx[static_cast<size_t>(dir)] = fixed;
      out.push_back(ix.flat(idx));
    }
    return out;
  }

  /// Geometry evaluation F(xi).
  Eigen::VectorXd eval(const std::vector<double>& xi) const {
    Basis b = basis_at(xi, 0);
    Eigen::VectorXd A = Eigen::VectorXd::Zero(pts_.cols());
    double W = 0.0;
    for_each_active(b, [&](int flat, const double* shape) {
      const double c = shape[0] * wts_[flat];
      A += c * pts_.row(flat).transpose();
      W += c;
    });
    return A / W;
  }

  /// Jacobian: column a holds dF/dxi_a.
  Eigen::MatrixXd jacobian(const std::vector<double>& xi) const {
    Basis b = basis_at(xi, 1);
    const int d = dim(), pc = static_cast<int>(pts_.cols());
    Eigen::VectorXd A = Eigen::VectorXd::Zero(pc);
    Eigen::MatrixXd dA = Eigen::MatrixXd::Zero(pc, d);
    double W = 0.0;
    Eigen::VectorXd dW = Eigen::VectorXd::Zero(d);
    for_each_active(b, [&](int flat, const double* shape) {
      const double w = wts_[flat];
      A += shape[0] * w * pts_.row(flat).transpose();
      W += shape[0] * w;
      for (int a = 0; a < d; ++a) {
        dA.col(a) += shape[1 + a] * w * pts_.row(flat).transpose();
        dW[a] += shape[1 + a] * w;
      }
    });
    const Eigen::VectorXd F = A / W;
    Eigen::MatrixXd J(pc, d);
    for (int a = 0; a < d; ++a) J.col(a) = (dA.col(a) - dW[a] * F) / W;
    return J;
  }

  /// Second parametric derivatives: out[c](a,b) = d^2 F_c / dxi_a dxi_b.
  std::vector<Eigen::MatrixXd> second_derivatives(const std::vector<double>& xi) const {
    Basis b = basis_at(xi, 2);
    const int d = dim(), pc = static_cast<int>(pts_.cols());
    Eigen::VectorXd A = Eigen::VectorXd::Zero(pc);
    Eigen::MatrixXd dA = Eigen::MatrixXd::Zero(pc, d);
    std::vector<Eigen::VectorXd> ddA(static_cast<size_t>(d * d),
                                     Eigen::VectorXd::Zero(pc));
    double W = 0.0;
    Eigen::VectorXd dW = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd ddW = Eigen::MatrixXd::Zero(d, d);
    for_each_active(b, [&](int flat, const double* shape) {
      const double w = wts_[flat];
      A += shape[0] * w * pts_.row(flat).transpose();
      W += shape[0] * w;
      for (int a = 0; a < d; ++a) {
        dA.col(a) += shape[1 + a] * w * pts_.row(flat).transpose();
        dW[a] += shape[1 + a] * w;
      }
      int s = 1 + d;
      for (int a = 0; a < d; ++a)
        for (int bb = a; bb < d; ++bb, ++s) {
          ddA[static_cast<size_t>(a * d + bb)] += shape[s] * w * pts_.row(flat).transpose();
          ddW(a, bb) += shape[s] * w;
        }
    });
    const Eigen::VectorXd F = A / W;
    Eigen::MatrixXd dF(pc, d);
    for (int a = 0; a < d; ++a) dF.col(a) = (dA.col(a) - dW[a] * F) / W;
    std::vector<Eigen::MatrixXd> out(static_cast<size_t>(pc),
                                     Eigen::MatrixXd::Zero(d, d));
    for (int a = 0; a < d; ++a)
      for (int bb = a; bb < d; ++bb) {
        const Eigen::VectorXd num = ddA[static_cast<size_t>(a * d + bb)] -
                                    ddW(a, bb) * F - dW[a] * dF.col(bb) -
                                    dW[bb] * dF.col(a);
        for (int c = 0; c < pc; ++c) {
          out[static_cast<size_t>(c)](a, bb) = num[c] / W;
          out[static_cast<size_t>(c)](bb, a) = num[c] / W;
        }
      }
    return out;
  }

  // -- exact surgery ---------------------------------------------------------

  TensorPatch with_inserted_knots(int dir, const std::vector<double>& values) const {
    auto [kv2, M] = apply_dir(dir, [&](const KnotVector& k, const Eigen::MatrixXd& C) {
      return insert_knots(k, C, values);
    });
    return rebuild(dir, kv2, M);
  }

  TensorPatch refined_uniform(int times = 1) const {
    TensorPatch out = *this;
    for (int a = 0; a < dim(); ++a) {
      auto [kv2, M] = out.apply_dir(a, [&](const KnotVector& k, const Eigen::MatrixXd& C) {
        return refine_uniform(k, C, times);
      });
      out = out.rebuild(a, kv2, M);
    }
    return out;
  }

  TensorPatch elevated(int t = 1) const {
    TensorPatch out = *this;
    for (int a = 0; a < dim(); ++a) {
      auto [kv2, M] = out.apply_dir(a, [&](const KnotVector& k, const Eigen::MatrixXd& C) {
        return elevate_degree(k, C, t);
      });
      out = out.rebuild(a, kv2, M);
    }
    return out;
  }

  /// Split along one direction at an interior parameter. The pieces keep
  /// their sub-ranges; call normalized() to remap onto [0,1].
  std::pair<TensorPatch, TensorPatch> split(int dir, double value) const {
    TensorPatch tmp = *this;
    const int p = kv(dir).degree();
    const int have = kv(dir).multiplicity(value);
    if (have < p) tmp = with_inserted_knots(dir, std::vector<double>(p - have, value));
    // locate the run of `value` and cut the coefficient tensor
    const KnotVector& k = tmp.kv(dir);
    int f = 0;
    while (k.knot(f) != value) ++f;

    auto cut = [&](int lo, int count, KnotVector nk) {
      auto ix = tmp.indexer();
      TensorIndexer nix = ix;
      nix.dims[static_cast<size_t>(dir)] = count;
      Eigen::MatrixXd P(nix.size(), tmp.pts_.cols());
      Eigen::VectorXd W(nix.size());
      for (int c = 0; c < nix.size(); ++c) {
        auto idx = nix.unflat(c);
        idx[static_cast<size_t>(dir)] += lo;
        const int src = ix.flat(idx);
        P.row(c) = tmp.pts_.row(src);
        W[c] = tmp.wts_[src];
      }
      std::vector<KnotVector> ks = tmp.kvs_;
      ks[static_cast<size_t>(dir)] = std::move(nk);
      return TensorPatch(std::move(ks), std::move(P), std::move(W));
    };

    const auto& T = k.knots();
    std::vector<double> lk(T.begin(), T.begin() + f + p);
    lk.push_back(value);
    std::vector<double> rk(static_cast<size_t>(p + 1), value);
    rk.insert(rk.end(), T.begin() + f + p, T.end());
    const int n = k.size();
    return {cut(0, f, KnotVector(p, std::move(lk))),
            cut(f - 1, n - f + 1, KnotVector(p, std::move(rk)))};
  }

  /// Remap every direction onto [0,1]. The traced geometry is unchanged.
  TensorPatch normalized() const {
    TensorPatch out = *this;
    for (auto& k : out.kvs_) {
      auto [lo, hi] = k.domain();
      if (lo == 0.0 && hi == 1.0) continue;
      k = normalize_knots(k);
    }
    return out;
  }

  /// FNV-1a hash over degrees, knots, weights and control points;
  /// bit-identical patches hash equal.
  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, size_t len) {
      const unsigned char* b = static_cast<const unsigned char*>(data);
      for (size_t i = 0; i < len; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
      }
    };
    for (const auto& k : kvs_) {
      const int p = k.degree();
      mix(&p, sizeof(p));
      mix(k.knots().data(), k.knots().size() * sizeof(double));
    }
    mix(pts_.data(), static_cast<size_t>(pts_.size()) * sizeof(double));
    mix(wts_.data(), static_cast<size_t>(wts_.size()) * sizeof(double));
    return h;
  }

  // Basis bundle: values and derivatives of all active functions at a point.
  struct Basis {
    int span[3] = {0, 0, 0};
    Eigen::MatrixXd ders[3];  // per direction: rows = derivative order
    int order = 0;
    const TensorPatch* patch = nullptr;
  };

  Basis basis_at(const std::vector<double>& xi, int order) const {
    if (static_cast<int>(xi.size()) != dim())
      throw argument_error("TensorPatch: parametric point has wrong dimension");
    Basis b;
    b.order = order;
    b.patch = this;
    for (int a = 0; a < dim(); ++a) {
      b.span[a] = kvs_[static_cast<size_t>(a)].find_span(xi[static_cast<size_t>(a)]);
      b.ders[a] = kvs_[static_cast<size_t>(a)].eval_basis_ders(
          b.span[a], xi[static_cast<size_t>(a)], order);
    }
    return b;
  }

  /// Visit all active control indices; `shape` packs
  /// [value, d/dxi_1..d/dxi_d, upper-triangular second derivatives].
  template <class F>
  void for_each_active(const Basis& b, F&& f) const {
    const int d = dim();
    std::vector<int> pdeg(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) pdeg[static_cast<size_t>(a)] = kvs_[static_cast<size_t>(a)].degree();
    auto ix = indexer();
    const int nshape = 1 + (b.order >= 1 ? d : 0) + (b.order >= 2 ? d * (d + 1) / 2 : 0);
    std::vector<double> shape(static_cast<size_t>(nshape));
    std::vector<int> loc(static_cast<size_t>(d), 0);
    std::vector<int> idx(static_cast<size_t>(d));
    while (true) {
      for (int a = 0; a < d; ++a)
        idx[static_cast<size_t>(a)] =
            b.span[a] - pdeg[static_cast<size_t>(a)] + loc[static_cast<size_t>(a)];
      double v = 1.0;
      for (int a = 0; a < d; ++a) v *= b.ders[a](0, loc[static_cast<size_t>(a)]);
      shape[0] = v;
      if (b.order >= 1) {
        for (int a = 0; a < d; ++a) {
          double g = 1.0;
          for (int c = 0; c < d; ++c)
            g *= b.ders[c](c == a ? 1 : 0, loc[static_cast<size_t>(c)]);
          shape[static_cast<size_t>(1 + a)] = g;
        }
      }
      if (b.order >= 2) {
        int s = 1 + d;
        for (int a = 0; a < d; ++a)
          for (int bb = a; bb < d; ++bb, ++s) {
            double g = 1.0;
            for (int c = 0; c < d; ++c) {
              int ord = 0;
              if (c == a) ord += 1;
              if (c == bb) ord += 1;
              g *= b.ders[c](ord, loc[static_cast<size_t>(c)]);
            }
            shape[static_cast<size_t>(s)] = g;
          }
      }
      f(ix.flat(idx), shape.data());
      // advance the local multi-index, first direction fastest
      int a = 0;
      while (a < d) {
        if (++loc[static_cast<size_t>(a)] <= pdeg[static_cast<size_t>(a)]) break;
        loc[static_cast<size_t>(a)] = 0;
        ++a;
      }
      if (a == d) break;
    }
  }

 private:
  void validate() const {
    if (kvs_.empty()) throw argument_error("TensorPatch: no knot vectors");
    int n = 1;
    for (const auto& k : kvs_) n *= k.size();
    if (pts_.rows() != n)
      throw argument_error("TensorPatch: control net size does not match knots");
    if (wts_.size() != n)
      throw argument_error("TensorPatch: weight count does not match control net");
    if ((wts_.array() <= 0.0).any())
      throw argument_error("TensorPatch: weights must be positive");
  }

  // Reorganize the homogeneous coefficients so `dir` runs over rows.
  template <class Op>
  std::pair<KnotVector, Eigen::MatrixXd> apply_dir(int dir, Op&& op) const {
    auto ix = indexer();
    const int nd = ix.dims[static_cast<size_t>(dir)];
    const int rest = ix.size() / nd;
    const int pc = static_cast<int>(pts_.cols());
    Eigen::MatrixXd M(nd, rest * (pc + 1));
    std::vector<int> idx(kvs_.size());
    for (int c = 0; c < rest; ++c) {
      int rem = c;
      for (size_t a = 0; a < kvs_.size(); ++a) {
        if (static_cast<int>(a) == dir) continue;
        idx[a] = rem % ix.dims[a];
        rem /= ix.dims[a];
      }
      for (int i = 0; i < nd; ++i) {
        idx[static_cast<size_t>(dir)] = i;
        const int src = ix.flat(idx);
        const double w = wts_[src];
        for (int k = 0; k < pc; ++k) M(i, c * (pc + 1) + k) = w * pts_(src, k);
        M(i, c * (pc + 1) + pc) = w;
      }
    }
    auto res = op(kvs_[static_cast<size_t>(dir)], M);
    return {std::move(res.kv), std::move(res.coefs)};
  }

  TensorPatch rebuild(int dir, const KnotVector& kv2, const Eigen::MatrixXd& M) const {
    auto ix = indexer();
    TensorIndexer nix = ix;
    nix.dims[static_cast<size_t>(dir)] = kv2.size();
    const int nd = kv2.size();
    const int rest = nix.size() / nd;
    const int pc = static_cast<int>(pts_.cols());
    Eigen::MatrixXd P(nix.size(), pc);
    Eigen::VectorXd W(nix.size());
    std::vector<int> idx(kvs_.size());
    for (int c = 0; c < rest; ++c) {
      int rem = c;
      for (size_t a = 0; a < kvs_.size(); ++a) {
        if (static_cast<int>(a) == dir) continue;
        idx[a] = rem % nix.dims[a];
        rem /= nix.dims[a];
      }
      for (int i = 0; i < nd; ++i) {
        idx[static_cast<size_t>(dir)] = i;
        const int dst = nix.flat(idx);
        const double w = M(i, c * (pc + 1) + pc);
        W[dst] = w;
        for (int k = 0; k < pc; ++k) P(dst, k) = M(i, c * (pc + 1) + k) / w;
      }
    }
    std::vector<KnotVector> ks = kvs_;
    ks[static_cast<size_t>(dir)] = kv2;
    return TensorPatch(std::move(ks), std::move(P), std::move(W));
  }

  std::vector<KnotVector> kvs_;
  Eigen::MatrixXd pts_;
  Eigen::VectorXd wts_;
};

}  // namespace splinemove
