#pragma once

#include <compare>
#include <cstddef>
#include <functional>

namespace asd {

template <class Tag>
struct Index {
  std::size_t value = 0;

  constexpr Index() = default;
  constexpr explicit Index(std::size_t v) : value(v) {}
  auto operator<=>(const Index&) const = default;
};

using SymptomId = Index<struct SymptomTag>;
using DiseaseId = Index<struct DiseaseTag>;

}  // namespace asd

template <class Tag>
struct std::hash<asd::Index<Tag>> {
  std::size_t operator()(const asd::Index<Tag>& i) const noexcept { return std::hash<std::size_t>{}(i.value); }
};
