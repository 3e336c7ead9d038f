#include "qam/report.hpp"

#include <string>

namespace qam {

std::string to_decimal_string(const Rational& q, int significant_digits) {
    if (q == 0) return "0";
    mpf_class f(q, 256);
    mp_exp_t exp = 0;
    std::string digits = f.get_str(exp, 10, static_cast<size_t>(significant_digits));
    bool negative = false;
    if (!digits.empty() && digits[0] == '-') {
        negative = true;
        digits.erase(0, 1);
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    // digits represent 0.<digits> * 10^exp
    std::string out;
    long e = static_cast<long>(exp);
    if (e > 0 && e <= significant_digits + 2) {
        if (static_cast<size_t>(e) >= digits.size()) {
            out = digits + std::string(static_cast<size_t>(e) - digits.size(), '0');
        } else {
            out = digits.substr(0, static_cast<size_t>(e)) + "." + digits.substr(static_cast<size_t>(e));
        }
    } else if (e <= 0 && e > -4) {
        out = "0." + std::string(static_cast<size_t>(-e), '0') + digits;
    } else {
        out = digits.substr(0, 1);
        if (digits.size() > 1) out += "." + digits.substr(1);
        out += "e" + std::to_string(e - 1);
    }
    return negative ? "-" + out : out;
}

Json probability_json(const Rational& q) {
    Json j;
    j["exact"] = to_fraction_string(q);
    j["approx"] = to_decimal_string(q);
    return j;
}

}  // namespace qam
