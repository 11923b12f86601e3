#pragma once

#include <string>
#include <vector>

#include "rtrim/core.hpp"

namespace rtrim {

// Reads the canonical dataset format: one JSON object per line with exactly
// the fields id, question and answer. Gold answers are normalized on load.
// Malformed lines and duplicate ids raise DataError with the line number.
std::vector<QuestionRecord> load_dataset(const std::string& path);

void save_dataset(const std::vector<QuestionRecord>& records, const std::string& path);

enum class ImportFormat { gsm8k, math, aime };

std::optional<ImportFormat> parse_import_format(std::string_view name);

// Converts a public dataset dump into the canonical format. gsm8k answers
// sit after a #### marker, math answers come from an answer field or the
// boxed group of the reference solution, aime answers are plain integers.
std::vector<QuestionRecord> import_dataset(ImportFormat format, const std::string& path);

}  // namespace rtrim
