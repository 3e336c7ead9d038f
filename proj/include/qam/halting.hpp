#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qam/linalg.hpp"

namespace qam {

// The nonhalting part of an absolutely-halting machine's dynamics: one step
// maps the density-like matrix nu to sum_i E_i nu E_i^T.
struct NonhaltingSystem {
    int n = 0;                     // dimension (number of standard configurations)
    std::vector<Matrix> elements;  // E_1 ... E_k, each n x n
    Matrix nu0;                    // initial matrix, symmetric PSD, unnormalized

    void validate() const;  // throws std::invalid_argument
};

struct VectorizedSystem {
    Matrix big_e;  // sum_i E_i (x) E_i, n^2 x n^2
    Vector v0;     // column stacking of nu0
};

Vector vec_of(const Matrix& m);  // column stacking

VectorizedSystem vectorize(const NonhaltingSystem& sys);

struct HaltingIndex {
    bool halts = false;
    int index = -1;  // first j with v_j = 0 when halts
};

// Iterates v_{j+1} = bigE v_j from v_0 = vec(nu0); the nonhalting mass is
// gone exactly when the vector is zero, and if it survives n^2 steps it
// survives forever.
HaltingIndex halting_index(const NonhaltingSystem& sys);

// Nullities of m^j for j = 1 .. rows(m): nondecreasing, constant once they
// repeat, constant from index <= rows(m).
std::vector<int> kernel_chain(const Matrix& m);

// Elements file: a dimension line `dim: n`, blocks `element:` / `nu0:`
// each followed by n rows of n rationals (`num/den` or integers);
// // comments and blank lines ignored.
NonhaltingSystem parse_elements_file(std::istream& in);
NonhaltingSystem load_elements_file(const std::string& path);

}  // namespace qam
