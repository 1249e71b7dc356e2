#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <tuple>
#include <vector>

#include "kachanov/errors.hpp"
#include "kachanov/mesh.hpp"

namespace kachanov {

/// Sparse symmetric matrix in CSR form, storing the full pattern.
/// Immutable after assembly; matvec is safe for concurrent callers.
struct SparseSym {
    int n = 0;
    std::vector<int> row_ptr;  ///< size n+1
    std::vector<int> col;      ///< sorted, unique per row
    std::vector<double> val;

    double* find(int i, int j) {
        auto first = col.begin() + row_ptr[i], last = col.begin() + row_ptr[i + 1];
        auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return nullptr;
        return &val[size_t(it - col.begin())];
    }
    const double* find(int i, int j) const { return const_cast<SparseSym*>(this)->find(i, j); }
};

struct Triplet {
    int i, j;
    double v;
};

/// Builds a SparseSym from (i, j, value) triplets; duplicates are summed.
inline SparseSym assemble_from_triplets(int n, std::vector<Triplet> triplets) {
    for (const auto& t : triplets)
        if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n)
            throw IndexOutOfRange("triplet (" + std::to_string(t.i) + "," + std::to_string(t.j) +
                                  ") outside dimension " + std::to_string(n));
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    SparseSym A;
    A.n = n;
    A.row_ptr.assign(size_t(n) + 1, 0);
    for (size_t k = 0; k < triplets.size();) {
        size_t e = k;
        double sum = 0.0;
        while (e < triplets.size() && triplets[e].i == triplets[k].i && triplets[e].j == triplets[k].j)
            sum += triplets[e++].v;
        A.col.push_back(triplets[k].j);
        A.val.push_back(sum);
        ++A.row_ptr[triplets[k].i + 1];
        k = e;
    }
    for (int i = 0; i < n; ++i) A.row_ptr[i + 1] += A.row_ptr[i];
    return A;
}

inline void matvec(const SparseSym& A, std::span<const double> x, std::span<double> y) {
    for (int i = 0; i < A.n; ++i) {
        double s = 0.0;
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
        y[i] = s;
    }
}

/// Largest |A_ij - A_ji| over the stored pattern (diagnostic).
inline double max_asymmetry(const SparseSym& A) {
    double worst = 0.0;
    for (int i = 0; i < A.n; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const double* t = A.find(A.col[k], i);
            worst = std::max(worst, std::abs(A.val[k] - (t ? *t : 0.0)));
        }
    return worst;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Orthonormal dense vectors spanning the subspace to remove from a singular
/// system (the discrete rigid-body modes for pure-traction elasticity).
struct DeflationSpace {
    std::vector<std::vector<double>> basis;

    /// x <- x - V V^T x
    void project(std::span<double> x) const {
        for (const auto& v : basis) {
            const double c = dot(v, x);
            for (size_t k = 0; k < x.size(); ++k) x[k] -= c * v[k];
        }
    }
};

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. With a deflation space the
/// right-hand side and all iterates are kept orthogonal to it, so singular
/// pure-Neumann systems solve in the complement of their nullspace.
/// The reported residual is |A x - b_proj| / |b_proj|.
inline CgResult cg_solve(const SparseSym& A, std::vector<double> b, double tol, int max_iter,
                         const DeflationSpace* deflate = nullptr,
                         const std::vector<double>* initial = nullptr) {
    const int n = A.n;
    std::vector<double> diag_inv(n);
    for (int i = 0; i < n; ++i) {
        const double* d = A.find(i, i);
        if (!d || *d == 0.0) throw ZeroDiagonal("zero diagonal at row " + std::to_string(i));
        diag_inv[i] = 1.0 / *d;
    }
    if (deflate) deflate->project(b);
    const double bnorm = norm2(b);
    CgResult res;
    res.x.assign(size_t(n), 0.0);
    if (bnorm == 0.0) return res;

    if (initial && int(initial->size()) == n) {
        res.x = *initial;
        if (deflate) deflate->project(res.x);
    }
    std::vector<double> r(n), z(n), p(n), q(n);
    matvec(A, res.x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    if (deflate) deflate->project(r);
    for (int i = 0; i < n; ++i) z[i] = diag_inv[i] * r[i];
    if (deflate) deflate->project(z);
    p = z;
    double rz = dot(r, z);
    double rnorm = norm2(r);
    int it = 0;
    while (rnorm / bnorm > tol) {
        if (it >= max_iter) throw NoConvergence(it, rnorm / bnorm);
        matvec(A, p, q);
        const double pq = dot(p, q);
        if (pq <= 0.0) throw NoConvergence(it, rnorm / bnorm);
        const double alpha = rz / pq;
        for (int i = 0; i < n; ++i) res.x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * q[i];
        if (deflate) deflate->project(r);
        rnorm = norm2(r);
        for (int i = 0; i < n; ++i) z[i] = diag_inv[i] * r[i];
        if (deflate) deflate->project(z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++it;
    }
    if (deflate) deflate->project(res.x);
    res.iterations = it;
    res.residual = rnorm / bnorm;
    return res;
}

/// The three discrete rigid-body modes of a 2D mesh in the interleaved
/// vector-P1 layout, orthonormalized: x-translation, y-translation, and the
/// infinitesimal rotation (-y, x).
inline DeflationSpace rigid_body_modes(const Mesh& mesh) {
    const int nv = mesh.num_vertices();
    DeflationSpace space;
    space.basis.assign(3, std::vector<double>(size_t(2) * nv, 0.0));
    for (int i = 0; i < nv; ++i) {
        space.basis[0][2 * i] = 1.0;
        space.basis[1][2 * i + 1] = 1.0;
        space.basis[2][2 * i] = -mesh.vertices[i].y;
        space.basis[2][2 * i + 1] = mesh.vertices[i].x;
    }
    // modified Gram-Schmidt
    for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < k; ++j) {
            const double c = dot(space.basis[j], space.basis[k]);
            for (size_t idx = 0; idx < space.basis[k].size(); ++idx)
                space.basis[k][idx] -= c * space.basis[j][idx];
        }
        const double nrm = norm2(space.basis[k]);
        for (double& v : space.basis[k]) v /= nrm;
    }
    return space;
}

}  // namespace kachanov
