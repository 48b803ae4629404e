#include "streamsched/op_class.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>

namespace streamsched {
namespace {

struct TableEntry {
  std::string_view name;
  OpClass op_class;
};

constexpr std::array<TableEntry, 13> kOperatorTable{{
    {"conv", OpClass::ComputeIntensive},
    {"matmul", OpClass::ComputeIntensive},
    {"sgemm", OpClass::ComputeIntensive},
    {"gemm", OpClass::ComputeIntensive},
    {"attention", OpClass::ComputeIntensive},
    {"relu", OpClass::MemoryIntensive},
    {"add", OpClass::MemoryIntensive},
    {"concat", OpClass::MemoryIntensive},
    {"pool", OpClass::MemoryIntensive},
    {"embedding", OpClass::MemoryIntensive},
    {"arange", OpClass::MemoryIntensive},
    {"to", OpClass::MemoryIntensive},
    {"ones", OpClass::MemoryIntensive},
}};

std::optional<OpClass> lookup(std::string_view key) {
  auto it = std::find_if(kOperatorTable.begin(), kOperatorTable.end(),
                         [&](const TableEntry& e) { return e.name == key; });
  if (it == kOperatorTable.end()) return std::nullopt;
  return it->op_class;
}

}  // namespace

Classification classify(std::string_view name) {
  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (auto c = lookup(lowered)) return {*c, true};

  auto token_end = std::find_if(lowered.begin(), lowered.end(),
                                [](unsigned char c) { return !std::isalpha(c); });
  std::string_view token(lowered.data(), static_cast<std::size_t>(token_end - lowered.begin()));
  if (!token.empty() && token.size() != lowered.size()) {
    if (auto c = lookup(token)) return {*c, true};
  }
  return {OpClass::ComputeIntensive, false};
}

}  // namespace streamsched
