#include "qam/linalg.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace qam {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

bool Vector::is_zero() const {
    for (const auto& e : entries) {
        if (e != 0) return false;
    }
    return true;
}

Rational Vector::norm_squared() const { return dot(*this); }

Rational Vector::dot(const Vector& other) const {
    require(dim() == other.dim(), "vector dimension mismatch");
    Rational acc = 0;
    for (int i = 0; i < dim(); ++i) acc += entries[static_cast<size_t>(i)] * other.entries[static_cast<size_t>(i)];
    return acc;
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Matrix Matrix::zero(int r, int c) { return Matrix(r, c); }

Matrix Matrix::from_rows(const std::vector<std::vector<Rational>>& rows) {
    require(!rows.empty(), "empty matrix literal");
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int r = 0; r < m.rows; ++r) {
        require(static_cast<int>(rows[static_cast<size_t>(r)].size()) == m.cols,
                "ragged matrix literal");
        for (int c = 0; c < m.cols; ++c) m.at(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
    }
    return m;
}

bool Matrix::operator==(const Matrix& other) const {
    return rows == other.rows && cols == other.cols && data == other.data;
}

Matrix Matrix::transpose() const {
    Matrix t(cols, rows);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
    return t;
}

bool Matrix::is_symmetric() const {
    if (!is_square()) return false;
    for (int r = 0; r < rows; ++r)
        for (int c = r + 1; c < cols; ++c)
            if (at(r, c) != at(c, r)) return false;
    return true;
}

bool Matrix::is_zero() const {
    for (const auto& e : data)
        if (e != 0) return false;
    return true;
}

Matrix Matrix::operator*(const Matrix& other) const {
    require(cols == other.rows, "matrix product dimension mismatch");
    Matrix out(rows, other.cols);
    for (int r = 0; r < rows; ++r) {
        for (int k = 0; k < cols; ++k) {
            const Rational& v = at(r, k);
            if (v == 0) continue;
            for (int c = 0; c < other.cols; ++c) out.at(r, c) += v * other.at(k, c);
        }
    }
    return out;
}

Vector Matrix::operator*(const Vector& v) const {
    require(cols == v.dim(), "matrix-vector dimension mismatch");
    Vector out(rows);
    for (int r = 0; r < rows; ++r) {
        Rational acc = 0;
        for (int c = 0; c < cols; ++c) acc += at(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

Matrix Matrix::operator+(const Matrix& other) const {
    require(rows == other.rows && cols == other.cols, "matrix sum dimension mismatch");
    Matrix out(rows, cols);
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = data[i] + other.data[i];
    return out;
}

Matrix Matrix::operator-(const Matrix& other) const {
    require(rows == other.rows && cols == other.cols, "matrix difference dimension mismatch");
    Matrix out(rows, cols);
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = data[i] - other.data[i];
    return out;
}

Matrix Matrix::scaled(const Rational& s) const {
    Matrix out(rows, cols);
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = data[i] * s;
    return out;
}

Matrix Matrix::kron(const Matrix& other) const {
    Matrix out(rows * other.rows, cols * other.cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const Rational& v = at(r, c);
            if (v == 0) continue;
            for (int r2 = 0; r2 < other.rows; ++r2)
                for (int c2 = 0; c2 < other.cols; ++c2)
                    out.at(r * other.rows + r2, c * other.cols + c2) = v * other.at(r2, c2);
        }
    return out;
}

Rational determinant(const Matrix& m) {
    require(m.is_square(), "determinant of non-square matrix");
    int n = m.rows;
    Matrix a = m;
    Rational det = 1;
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r) {
            if (a.at(r, col) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) return Rational(0);
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a.at(pivot, c), a.at(col, c));
            det = -det;
        }
        det *= a.at(col, col);
        Rational inv = 1 / a.at(col, col);
        for (int r = col + 1; r < n; ++r) {
            if (a.at(r, col) == 0) continue;
            Rational f = a.at(r, col) * inv;
            for (int c = col; c < n; ++c) a.at(r, c) -= f * a.at(col, c);
        }
    }
    return det;
}

int matrix_rank(Matrix m) {
    int rank = 0;
    int row = 0;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        int pivot = -1;
        for (int r = row; r < m.rows; ++r) {
            if (m.at(r, col) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != row)
            for (int c = 0; c < m.cols; ++c) std::swap(m.at(pivot, c), m.at(row, c));
        Rational inv = 1 / m.at(row, col);
        for (int r = row + 1; r < m.rows; ++r) {
            if (m.at(r, col) == 0) continue;
            Rational f = m.at(r, col) * inv;
            for (int c = col; c < m.cols; ++c) m.at(r, c) -= f * m.at(row, c);
        }
        ++rank;
        ++row;
    }
    return rank;
}

bool linear_solve(Matrix a, Vector b, Vector& x) {
    require(a.is_square() && a.rows == b.dim(), "linear_solve dimension mismatch");
    int n = a.rows;
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r) {
            if (a.at(r, col) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) return false;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(a.at(pivot, c), a.at(col, c));
            std::swap(b[pivot], b[col]);
        }
        Rational inv = 1 / a.at(col, col);
        for (int r = 0; r < n; ++r) {
            if (r == col || a.at(r, col) == 0) continue;
            Rational f = a.at(r, col) * inv;
            for (int c = col; c < n; ++c) a.at(r, c) -= f * a.at(col, c);
            b[r] -= f * b[col];
        }
    }
    x = Vector(n);
    for (int i = 0; i < n; ++i) x[i] = b[i] / a.at(i, i);
    return true;
}

Matrix gram_sum(const std::vector<Matrix>& elements) {
    require(!elements.empty(), "gram_sum of empty element list");
    int n = elements[0].rows;
    for (const auto& e : elements)
        require(e.is_square() && e.rows == n, "gram_sum dimension mismatch");
    Matrix acc = Matrix::zero(n, n);
    for (const auto& e : elements) acc = acc + e.transpose() * e;
    return acc;
}

bool psd_check(const Matrix& m, std::string* violated_minor) {
    require(m.is_square(), "psd_check on non-square matrix");
    require(m.is_symmetric(), "psd_check on non-symmetric matrix");
    int n = m.rows;
    // Enumerate every nonempty index subset; the dimensions here are tiny.
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        Matrix sub(static_cast<int>(idx.size()), static_cast<int>(idx.size()));
        for (size_t r = 0; r < idx.size(); ++r)
            for (size_t c = 0; c < idx.size(); ++c)
                sub.at(static_cast<int>(r), static_cast<int>(c)) = m.at(idx[r], idx[c]);
        if (determinant(sub) < 0) {
            if (violated_minor) {
                std::ostringstream oss;
                oss << "principal minor {";
                for (size_t i = 0; i < idx.size(); ++i) oss << (i ? "," : "") << idx[i];
                oss << "} is negative";
                *violated_minor = oss.str();
            }
            return false;
        }
    }
    return true;
}

bool psd_check(const Matrix& m) { return psd_check(m, nullptr); }

Superoperator Superoperator::make(std::vector<std::pair<std::string, Matrix>> elements,
                                  RestartMode mode) {
    require(!elements.empty(), "superoperator needs at least one main element");
    Superoperator s;
    s.dim = elements[0].second.rows;
    std::vector<Matrix> mats;
    for (const auto& [label, mat] : elements) {
        require(mat.is_square() && mat.rows == s.dim, "superoperator element dimension mismatch");
        mats.push_back(mat);
    }
    s.main_elements = std::move(elements);
    s.restart_mode = mode;
    s.slack = Matrix::identity(s.dim) - gram_sum(mats);
    return s;
}

ValidationResult superop_validate(const Superoperator& s) {
    if (s.restart_mode == RestartMode::Complete) {
        if (s.slack.is_zero()) return {true, ""};
        return {false, "completeness violated: sum E^T E != I"};
    }
    std::string minor;
    if (psd_check(s.slack, &minor)) return {true, ""};
    return {false, "slack not positive semidefinite: " + minor};
}

ApplyResult superop_apply(const Superoperator& s, const Vector& psi) {
    require(psi.dim() == s.dim, "superop_apply dimension mismatch");
    ApplyResult result;
    Rational consumed = 0;
    for (const auto& [label, mat] : s.main_elements) {
        Vector out = mat * psi;
        consumed += out.norm_squared();
        result.outcomes.push_back({label, std::move(out)});
    }
    result.restart_mass = psi.norm_squared() - consumed;
    return result;
}

Vector initialize(int dim, const Vector& target) {
    require(target.dim() == dim, "initialize dimension mismatch");
    return target;
}

int choose_scale_d(const std::vector<Matrix>& unscaled_mains) {
    Matrix gram = gram_sum(unscaled_mains);
    int n = gram.rows;
    for (int d = 2;; ++d) {
        Matrix candidate = Matrix::identity(n).scaled(Rational(d) * d) - gram;
        if (psd_check(candidate)) return d;
    }
}

}  // namespace qam
