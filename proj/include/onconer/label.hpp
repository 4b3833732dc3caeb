// Copyright 2026 The onconer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace onconer {

// The closed entity label set. Enumerator order is the column order used in
// the result tables (EVOL, FACTR, MUTAC, ANTPERSON, MET, PAT, SINT, TTO).
enum class Label : std::uint8_t {
  EVOL,
  FACTR,
  MUTAC,
  ANTPERSON,
  MET,
  PAT,
  SINT,
  TTO,
};

inline constexpr std::size_t kLabelCount = 8;

inline constexpr std::array<Label, kLabelCount> kTableOrder = {
    Label::EVOL, Label::FACTR, Label::MUTAC, Label::ANTPERSON,
    Label::MET,  Label::PAT,   Label::SINT,  Label::TTO,
};

// Alphabetical by name; the tag scheme is built from this ordering.
inline constexpr std::array<Label, kLabelCount> kAlphabeticalOrder = {
    Label::ANTPERSON, Label::EVOL, Label::FACTR, Label::MET,
    Label::MUTAC,     Label::PAT,  Label::SINT,  Label::TTO,
};

// Gazetteer tie-break order, most frequent label in annotated data first.
inline constexpr std::array<Label, kLabelCount> kPriorityOrder = {
    Label::MET,   Label::PAT,   Label::TTO,       Label::SINT,
    Label::FACTR, Label::MUTAC, Label::ANTPERSON, Label::EVOL,
};

constexpr std::string_view label_name(Label label) {
  switch (label) {
    case Label::EVOL: return "EVOL";
    case Label::FACTR: return "FACTR";
    case Label::MUTAC: return "MUTAC";
    case Label::ANTPERSON: return "ANTPERSON";
    case Label::MET: return "MET";
    case Label::PAT: return "PAT";
    case Label::SINT: return "SINT";
    case Label::TTO: return "TTO";
  }
  return "?";
}

constexpr std::string_view label_description(Label label) {
  switch (label) {
    case Label::EVOL: return "evolution";
    case Label::FACTR: return "risk factors";
    case Label::MUTAC: return "genetic mutations";
    case Label::ANTPERSON: return "personal history";
    case Label::MET: return "method of diagnosis";
    case Label::PAT: return "pathology";
    case Label::SINT: return "symptomatology";
    case Label::TTO: return "treatment";
  }
  return "?";
}

// ANTPERSON and MUTAC are only annotated in lung cancer reports.
constexpr bool is_lung_specific(Label label) {
  return label == Label::ANTPERSON || label == Label::MUTAC;
}

constexpr std::optional<Label> parse_label(std::string_view name) {
  for (Label label : kTableOrder) {
    if (label_name(label) == name) return label;
  }
  return std::nullopt;
}

constexpr std::size_t label_index(Label label) {
  return static_cast<std::size_t>(label);
}

// Position in kPriorityOrder; lower wins.
constexpr std::size_t label_priority(Label label) {
  for (std::size_t i = 0; i < kPriorityOrder.size(); ++i) {
    if (kPriorityOrder[i] == label) return i;
  }
  return kPriorityOrder.size();
}

}  // namespace onconer
