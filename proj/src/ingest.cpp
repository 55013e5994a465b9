#include "ktaug/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ktaug {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = line.find(delim, begin);
    out.push_back(trim(std::string_view(line).substr(begin, pos == std::string::npos ? pos : pos - begin)));
    if (pos == std::string::npos) break;
    begin = pos + 1;
  }
  return out;
}

std::optional<long long> as_integer(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

Table read_table(std::istream& in, char delim, const std::string& what) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, delim);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw std::runtime_error(what + " line " + std::to_string(line_no) + ": expected " +
                               std::to_string(t.header.size()) + " fields, found " +
                               std::to_string(fields.size()));
    t.rows.emplace_back(line_no, std::move(fields));
  }
  if (t.header.empty()) throw std::runtime_error(what + ": missing header");
  return t;
}

std::size_t column(const Table& t, const std::string& name, const std::string& what) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw std::runtime_error(what + ": missing required column '" + name + "'");
  return static_cast<std::size_t>(it - t.header.begin());
}

// Sorted distinct ids, numerically when all are integers.
std::vector<std::string> dense_order(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const bool numeric = std::all_of(ids.begin(), ids.end(), [](const auto& s) { return as_integer(s).has_value(); });
  if (numeric)
    std::sort(ids.begin(), ids.end(), [](const auto& a, const auto& b) { return *as_integer(a) < *as_integer(b); });
  return ids;
}

}  // namespace

IngestResult ingest(std::istream& interactions, std::istream* skills, const IngestOptions& opts) {
  const std::string what = "interactions";
  const Table t = read_table(interactions, opts.delimiter, what);
  const auto c_student = column(t, "student_id", what);
  const auto c_order = column(t, "order_key", what);
  const auto c_question = column(t, "question_id", what);
  const auto c_correct = column(t, "correct", what);

  struct Row {
    std::string student, question;
    double order;
    int correct;
  };
  IngestResult res;
  std::vector<Row> rows;
  for (const auto& [line_no, f] : t.rows) {
    const auto order = as_number(f[c_order]);
    const auto correct = as_number(f[c_correct]);
    if (!order || !correct || f[c_student].empty() || f[c_question].empty())
      throw std::runtime_error(what + " line " + std::to_string(line_no) + ": unparseable row");
    if (*correct != 0.0 && *correct != 1.0) {
      ++res.dropped_rows;
      continue;
    }
    rows.push_back({f[c_student], f[c_question], *order, *correct == 1.0 ? 1 : 0});
  }

  std::vector<std::string> qids;
  for (const auto& r : rows) qids.push_back(r.question);
  res.question_ids = dense_order(std::move(qids));
  std::map<std::string, QuestionId> qindex;
  for (std::size_t i = 0; i < res.question_ids.size(); ++i) qindex[res.question_ids[i]] = i;
  res.dataset.catalog_size = res.question_ids.size();

  std::map<std::string, std::size_t> student_index;
  std::vector<std::vector<std::pair<double, Interaction>>> per_student;
  for (const auto& r : rows) {
    auto [it, fresh] = student_index.try_emplace(r.student, per_student.size());
    if (fresh) {
      per_student.emplace_back();
      res.dataset.sequences.push_back({r.student, {}});
    }
    per_student[it->second].push_back({r.order, {qindex.at(r.question), r.correct}});
  }
  for (std::size_t s = 0; s < per_student.size(); ++s) {
    auto& events = per_student[s];
    std::stable_sort(events.begin(), events.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& e : events) res.dataset.sequences[s].interactions.push_back(e.second);
  }

  if (skills) {
    const std::string swhat = "skills";
    const Table st = read_table(*skills, opts.delimiter, swhat);
    const auto c_q = column(st, "question_id", swhat);
    const auto c_s = column(st, "skill_id", swhat);
    std::vector<std::string> sids;
    for (const auto& [line_no, f] : st.rows) {
      if (!qindex.count(f[c_q]))
        throw std::runtime_error(swhat + " line " + std::to_string(line_no) +
                                 ": unknown question '" + f[c_q] + "'");
      if (f[c_s].empty())
        throw std::runtime_error(swhat + " line " + std::to_string(line_no) + ": empty skill id");
      sids.push_back(f[c_s]);
    }
    res.skill_ids = dense_order(std::move(sids));
    std::map<std::string, SkillId> sindex;
    for (std::size_t i = 0; i < res.skill_ids.size(); ++i) sindex[res.skill_ids[i]] = i;
    SkillMap map(res.dataset.catalog_size);
    for (const auto& [line_no, f] : st.rows) map.add(qindex.at(f[c_q]), sindex.at(f[c_s]));
    res.skills = std::move(map);
  }
  return res;
}

IngestResult ingest(const std::filesystem::path& interactions,
                    const std::optional<std::filesystem::path>& skills, const IngestOptions& opts) {
  std::ifstream in(interactions);
  if (!in) throw std::runtime_error("cannot open " + interactions.string());
  if (!skills) return ingest(in, nullptr, opts);
  std::ifstream sk(*skills);
  if (!sk) throw std::runtime_error("cannot open " + skills->string());
  return ingest(in, &sk, opts);
}

IngestResult load_dataset_dir(const std::filesystem::path& dir) {
  const auto skills = dir / "skills.csv";
  return ingest(dir / "interactions.csv",
                std::filesystem::exists(skills) ? std::optional(skills) : std::nullopt);
}

void export_interactions(std::ostream& out, const Dataset& data) {
  out << "student_id,order_key,question_id,correct\n";
  for (const auto& s : data.sequences)
    for (std::size_t t = 0; t < s.size(); ++t)
      out << s.student_id << ',' << t + 1 << ',' << s.interactions[t].question << ','
          << s.interactions[t].response << '\n';
}

void export_skills(std::ostream& out, const SkillMap& skills) {
  out << "question_id,skill_id\n";
  for (QuestionId q = 0; q < skills.catalog_size(); ++q)
    if (skills.has(q))
      for (auto s : skills.skills_of(q)) out << q << ',' << s << '\n';
}

void export_id_map(std::ostream& out, const std::vector<std::string>& ids) {
  out << "original_id,dense_id\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << i << '\n';
}

void export_dataset_dir(const std::filesystem::path& dir, const IngestResult& data) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("interactions.csv");
    export_interactions(f, data.dataset);
  }
  if (!data.question_ids.empty()) {
    auto f = open("question_map.csv");
    export_id_map(f, data.question_ids);
  }
  if (data.skills) {
    auto f = open("skills.csv");
    export_skills(f, *data.skills);
    if (!data.skill_ids.empty()) {
      auto m = open("skill_map.csv");
      export_id_map(m, data.skill_ids);
    }
  }
}

}  // namespace ktaug
