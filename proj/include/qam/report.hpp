#pragma once

#include <json.hpp>

#include "qam/rational.hpp"

namespace qam {

using Json = nlohmann::ordered_json;

// Probability field with both exact ("num/den") and display forms.
Json probability_json(const Rational& q);

}  // namespace qam
