#pragma once

#include <string>
#include <vector>

namespace asd {

// Canonical 66-symptom / 28-disease pediatric vocabulary used by the shipped
// graph and by synthetic generators at that size.
const std::vector<std::string>& default_symptom_vocab();
const std::vector<std::string>& default_disease_vocab();

/// Default names when sizes match, else "S0".."Sn" / "D0".."Dn".
std::vector<std::string> symptom_names(std::size_t n);
std::vector<std::string> disease_names(std::size_t n);

}  // namespace asd
