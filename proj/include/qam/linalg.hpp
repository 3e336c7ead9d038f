#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qam/rational.hpp"

namespace qam {

struct Vector {
    std::vector<Rational> entries;

    Vector() = default;
    explicit Vector(int dim) : entries(static_cast<size_t>(dim)) {}
    Vector(std::initializer_list<Rational> init) : entries(init) {}

    int dim() const { return static_cast<int>(entries.size()); }
    Rational& operator[](int i) { return entries[static_cast<size_t>(i)]; }
    const Rational& operator[](int i) const { return entries[static_cast<size_t>(i)]; }

    bool operator==(const Vector& other) const { return entries == other.entries; }

    bool is_zero() const;
    // <v|v>; entries are real rationals, so no conjugation.
    Rational norm_squared() const;
    Rational dot(const Vector& other) const;
};

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<Rational> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

    static Matrix identity(int n);
    static Matrix zero(int r, int c);
    // Row-major initializer for small literals.
    static Matrix from_rows(const std::vector<std::vector<Rational>>& rows);

    Rational& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const Rational& at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    bool operator==(const Matrix& other) const;

    Matrix transpose() const;
    bool is_square() const { return rows == cols; }
    bool is_symmetric() const;
    bool is_zero() const;

    Matrix operator*(const Matrix& other) const;
    Vector operator*(const Vector& v) const;
    Matrix operator+(const Matrix& other) const;
    Matrix operator-(const Matrix& other) const;
    Matrix scaled(const Rational& s) const;

    // Kronecker product, used by the halting-bound vectorization.
    Matrix kron(const Matrix& other) const;
};

// Exact determinant by rational Gaussian elimination.
Rational determinant(const Matrix& m);

// Exact rank / nullity by Gaussian elimination.
int matrix_rank(Matrix m);
inline int nullity(const Matrix& m) { return m.cols - matrix_rank(m); }

// Solves A x = b exactly. Returns false when the system is singular
// (no unique solution).
bool linear_solve(Matrix a, Vector b, Vector& x);

// Sum of E^T E over the given operation elements. All matrices must be
// square and of equal dimension.
Matrix gram_sum(const std::vector<Matrix>& elements);

// Exact positive-semidefiniteness test for a symmetric rational matrix:
// every principal minor must be nonnegative. Intended for dimensions <= 6.
// Throws std::invalid_argument on non-symmetric input.
bool psd_check(const Matrix& m);
// Same test, reporting the first violated principal minor (as a list of
// row/column indices) when the answer is false.
bool psd_check(const Matrix& m, std::string* violated_minor);

enum class RestartMode {
    // Auxiliary operation elements are not materialized; their total effect
    // is a restart event carrying the residual probability mass.
    ImplicitRestart,
    // The listed elements already satisfy sum E^T E = I exactly.
    Complete,
};

struct Superoperator {
    int dim = 0;
    // Each matrix already includes its 1/d scale.
    std::vector<std::pair<std::string, Matrix>> main_elements;
    RestartMode restart_mode = RestartMode::ImplicitRestart;
    // I - sum E^T E, cached at construction.
    Matrix slack;

    static Superoperator make(std::vector<std::pair<std::string, Matrix>> elements,
                              RestartMode mode);
};

struct ValidationResult {
    bool ok = false;
    std::string diagnostic;
};

// Complete mode: slack must be exactly zero. ImplicitRestart: slack must be
// positive semidefinite. On failure the diagnostic names the violation.
ValidationResult superop_validate(const Superoperator& s);

struct ApplyOutcome {
    std::string label;
    Vector state;  // unconditional vector E_i |psi>
};

struct ApplyResult {
    std::vector<ApplyOutcome> outcomes;
    Rational restart_mass;  // <psi|psi> - sum_i <psi_i|psi_i>
};

ApplyResult superop_apply(const Superoperator& s, const Vector& psi);

// The initialize operator: a single outcome that discards the previous
// register content and loads the target vector.
Vector initialize(int dim, const Vector& target);

// Smallest integer d >= 2 such that d^2 I - sum M^T M is positive
// semidefinite; the superoperator is then built from the elements (1/d) M.
int choose_scale_d(const std::vector<Matrix>& unscaled_mains);

}  // namespace qam
