#pragma once

#include <string>

#include "whitney/core.hpp"
#include "whitney/wells.hpp"

namespace whitney {

constexpr int kModelFormatVersion = 1;

// Versioned JSON text. Reals are written in shortest round-trip form, which reads back bit for bit.
std::string model_to_json(const WellsModel& model);
// Throws ParseError on malformed or unsupported documents.
WellsModel model_from_json(const std::string& text);

std::string field_to_json(const OneField& field);

}  // namespace whitney
