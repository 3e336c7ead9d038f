#include "qam/halting.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qam {

void NonhaltingSystem::validate() const {
    if (n <= 0) throw std::invalid_argument("system dimension must be positive");
    for (const auto& e : elements)
        if (!e.is_square() || e.rows != n)
            throw std::invalid_argument("element dimension mismatch");
    if (!nu0.is_square() || nu0.rows != n)
        throw std::invalid_argument("nu0 dimension mismatch");
    if (!elements.empty()) {
        Matrix slack = Matrix::identity(n) - gram_sum(elements);
        if (!psd_check(slack))
            throw std::invalid_argument("elements violate sub-completeness: sum E^T E > I");
    }
    if (!nu0.is_symmetric() || !psd_check(nu0))
        throw std::invalid_argument("nu0 must be symmetric positive semidefinite");
}

Vector vec_of(const Matrix& m) {
    Vector v(m.rows * m.cols);
    int k = 0;
    for (int c = 0; c < m.cols; ++c)
        for (int r = 0; r < m.rows; ++r) v[k++] = m.at(r, c);
    return v;
}

VectorizedSystem vectorize(const NonhaltingSystem& sys) {
    sys.validate();
    VectorizedSystem out;
    out.big_e = Matrix::zero(sys.n * sys.n, sys.n * sys.n);
    for (const auto& e : sys.elements) out.big_e = out.big_e + e.kron(e);
    out.v0 = vec_of(sys.nu0);
    return out;
}

HaltingIndex halting_index(const NonhaltingSystem& sys) {
    VectorizedSystem vs = vectorize(sys);
    Vector v = vs.v0;
    int limit = sys.n * sys.n;
    for (int j = 0; j <= limit; ++j) {
        if (v.is_zero()) return {true, j};
        v = vs.big_e * v;
    }
    return {false, -1};
}

std::vector<int> kernel_chain(const Matrix& m) {
    if (!m.is_square()) throw std::invalid_argument("kernel_chain needs a square matrix");
    std::vector<int> nullities;
    Matrix power = m;
    for (int j = 1; j <= m.rows; ++j) {
        nullities.push_back(nullity(power));
        if (j < m.rows) power = power * m;
    }
    return nullities;
}

namespace {

std::vector<std::string> content_lines(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto cut = line.find("//");
        if (cut != std::string::npos) line.erase(cut);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        out.push_back(line.substr(first));
    }
    return out;
}

Matrix read_block(const std::vector<std::string>& lines, size_t& i, int n) {
    Matrix m(n, n);
    for (int r = 0; r < n; ++r) {
        if (i >= lines.size()) throw std::invalid_argument("elements file: truncated matrix block");
        std::istringstream row(lines[i++]);
        for (int c = 0; c < n; ++c) {
            std::string tok;
            if (!(row >> tok))
                throw std::invalid_argument("elements file: short matrix row");
            m.at(r, c) = parse_rational(tok);
        }
    }
    return m;
}

}  // namespace

NonhaltingSystem parse_elements_file(std::istream& in) {
    auto lines = content_lines(in);
    NonhaltingSystem sys;
    bool have_nu0 = false;
    size_t i = 0;
    while (i < lines.size()) {
        std::istringstream iss(lines[i]);
        std::string key;
        iss >> key;
        ++i;
        if (key == "dim:") {
            if (!(iss >> sys.n)) throw std::invalid_argument("elements file: dim: needs an integer");
        } else if (key == "element:") {
            if (sys.n <= 0) throw std::invalid_argument("elements file: dim: must come first");
            sys.elements.push_back(read_block(lines, i, sys.n));
        } else if (key == "nu0:") {
            if (sys.n <= 0) throw std::invalid_argument("elements file: dim: must come first");
            sys.nu0 = read_block(lines, i, sys.n);
            have_nu0 = true;
        } else {
            throw std::invalid_argument("elements file: unknown key '" + key + "'");
        }
    }
    if (!have_nu0) throw std::invalid_argument("elements file: missing nu0 block");
    sys.validate();
    return sys;
}

NonhaltingSystem load_elements_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open elements file: " + path);
    return parse_elements_file(in);
}

}  // namespace qam
