#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ktaug/core.hpp"

namespace ktaug {

struct IngestOptions {
  char delimiter = ',';
};

struct IngestResult {
  Dataset dataset;
  std::optional<SkillMap> skills;
  std::size_t dropped_rows = 0;           // correct not in {0, 1}
  std::vector<std::string> question_ids;  // dense id -> original id
  std::vector<std::string> skill_ids;     // dense id -> original id
};

// Interactions: header with student_id, order_key, question_id, correct (any column order,
// extra columns ignored). Skills: header with question_id, skill_id, one row per pair.
// Question and skill ids are re-indexed densely in sorted order (numeric when every id is
// an integer); sequences keep the order of each student's first row and are sorted by
// order_key (stable).
IngestResult ingest(std::istream& interactions, std::istream* skills, const IngestOptions& opts = {});
IngestResult ingest(const std::filesystem::path& interactions,
                    const std::optional<std::filesystem::path>& skills,
                    const IngestOptions& opts = {});

// Loads <dir>/interactions.csv and, when present, <dir>/skills.csv.
IngestResult load_dataset_dir(const std::filesystem::path& dir);

// Writes dense ids; order_key is the 1-based position within the student's sequence.
void export_interactions(std::ostream& out, const Dataset& data);
void export_skills(std::ostream& out, const SkillMap& skills);
void export_id_map(std::ostream& out, const std::vector<std::string>& ids);

// interactions.csv, skills.csv (if any), question_map.csv, skill_map.csv (if any).
void export_dataset_dir(const std::filesystem::path& dir, const IngestResult& data);

}  // namespace ktaug
