#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "ktaug/ingest.hpp"
#include "ktaug/synth.hpp"

using namespace ktaug;
namespace fs = std::filesystem;

namespace {

IngestResult parse(const std::string& interactions, const std::string* skills = nullptr) {
  std::istringstream in(interactions);
  if (!skills) return ingest(in, nullptr);
  std::istringstream sk(*skills);
  return ingest(in, &sk);
}

}  // namespace

TEST_CASE("rows with other correctness values are dropped") {
  const auto r = parse("student_id,order_key,question_id,correct\na,1,q1,1\na,2,q2,2\na,3,q1,0\n");
  CHECK(r.dropped_rows == 1);
  REQUIRE(r.dataset.sequences.size() == 1);
  CHECK(r.dataset.sequences[0].size() == 2);
  CHECK(r.dataset.catalog_size == 1);
}

TEST_CASE("interleaved students are grouped and ordered") {
  const auto r = parse(
      "correct,question_id,student_id,order_key,extra\n"
      "1,10,b,5,x\n0,7,a,3,x\n1,3,b,1,x\n1,10,a,1,x\n0,3,a,2,x\n");
  REQUIRE(r.dataset.sequences.size() == 2);
  const auto& b = r.dataset.sequences[0];
  const auto& a = r.dataset.sequences[1];
  CHECK(b.student_id == "b");
  CHECK(a.student_id == "a");
  // numeric ids are ranked numerically: 3 -> 0, 7 -> 1, 10 -> 2
  CHECK(r.question_ids == std::vector<std::string>{"3", "7", "10"});
  CHECK(b.interactions == std::vector<Interaction>{{0, 1}, {2, 1}});
  CHECK(a.interactions == std::vector<Interaction>{{2, 1}, {0, 0}, {1, 0}});
}

TEST_CASE("skills are re-indexed and attached") {
  const std::string skills = "question_id,skill_id\nq2,algebra\nq1,geometry\nq2,geometry\n";
  const auto r = parse("student_id,order_key,question_id,correct\ns,1,q1,1\ns,2,q2,0\n", &skills);
  REQUIRE(r.skills.has_value());
  CHECK(r.skill_ids == std::vector<std::string>{"algebra", "geometry"});
  CHECK(r.skills->skills_of(0) == std::set<SkillId>{1});
  CHECK(r.skills->skills_of(1) == std::set<SkillId>{0, 1});
}

TEST_CASE("ingest errors") {
  CHECK_THROWS_WITH_AS(parse("student_id,order_key,correct\na,1,1\n"),
                       doctest::Contains("question_id"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse("student_id,order_key,question_id,correct\na,1,q,1\na,x,q,1\n"),
                       doctest::Contains("line 3"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse("student_id,order_key,question_id,correct\na,1,q\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  const std::string bad_skills = "question_id,skill_id\nq9,s\n";
  CHECK_THROWS(parse("student_id,order_key,question_id,correct\na,1,q,1\n", &bad_skills));
  CHECK_THROWS(parse(""));
}

TEST_CASE("export then ingest round trips") {
  SynthConfig cfg;
  cfg.n_students = 30;
  cfg.seed = 9;
  const auto data = generate(cfg);
  std::ostringstream inter, sk;
  export_interactions(inter, data.dataset);
  export_skills(sk, data.skills);
  const auto skills_text = sk.str();
  const auto back = parse(inter.str(), &skills_text);
  CHECK(back.dropped_rows == 0);
  CHECK(back.dataset == data.dataset);
  CHECK(back.skills.value() == data.skills);

  const auto dir = fs::temp_directory_path() / "ktaug_ingest_roundtrip";
  fs::remove_all(dir);
  export_dataset_dir(dir, back);
  CHECK(fs::exists(dir / "question_map.csv"));
  const auto loaded = load_dataset_dir(dir);
  CHECK(loaded.dataset == data.dataset);
  CHECK(loaded.skills.value() == data.skills);
  fs::remove_all(dir);
}

TEST_CASE("alternative delimiter") {
  std::istringstream in("student_id\torder_key\tquestion_id\tcorrect\na\t2\tx\t1\na\t1\ty\t0\n");
  IngestOptions opts;
  opts.delimiter = '\t';
  const auto r = ingest(in, nullptr, opts);
  REQUIRE(r.dataset.sequences.size() == 1);
  CHECK(r.dataset.sequences[0].interactions == std::vector<Interaction>{{1, 0}, {0, 1}});
}
