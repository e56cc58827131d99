#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "freecp/report.hpp"

using namespace freecp;

namespace {

const char* kPlan = R"(# convergence sweep
[plan]
flavor = ge
k = 3
n_grid = 50, 100 ,200
p_list = 2, inf, 3.5
trials = 4
seed = 18446744073709551615
epsilon = 0.25
restarts = 5
max_iters = 40

[tolerances]
; comment
mc_edge = 2.5
custom = 1e-3
)";

int parse_error_line(const std::string& text) {
  try {
    parse_plan(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

std::string validation_field(const std::string& text) {
  try {
    parse_plan(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return {};
}

}  // namespace

TEST_CASE("Plan parsing") {
  const ExperimentPlan p = parse_plan(kPlan);
  CHECK(p.flavor == EnsembleFlavor::ginibre);
  CHECK(p.k == 3);
  CHECK(p.n_grid == std::vector<Eigen::Index>{50, 100, 200});
  REQUIRE(p.p_list.size() == 3);
  CHECK(p.p_list[1].is_infinite());
  CHECK(p.p_list[2].p() == 3.5);
  CHECK(p.trials == 4);
  CHECK(p.master_seed == 18446744073709551615ULL);
  CHECK(p.epsilon == 0.25);
  CHECK(p.restarts == 5);
  CHECK(p.max_iters == 40);
  CHECK(p.tolerance("mc_edge") == 2.5);
  CHECK(p.tolerance("mc_bulk") == 1.0);
  CHECK(p.tolerance("custom") == 1e-3);
  CHECK_THROWS_AS(p.tolerance("missing"), ValidationError);
}

TEST_CASE("Plan echo round-trips") {
  const ExperimentPlan p = parse_plan(kPlan);
  CHECK(parse_plan(echo_plan(p)) == p);
  const ExperimentPlan d = parse_plan("[plan]\n");
  CHECK(d == ExperimentPlan{});
  CHECK(parse_plan(echo_plan(d)) == d);
}

TEST_CASE("Plan errors carry line numbers") {
  CHECK(parse_error_line("[plan]\nk = 4\nk = 5\n") == 3);
  CHECK(parse_error_line("k = 4\n") == 1);
  CHECK(parse_error_line("[plan]\n\nbogus = 1\n") == 3);
  CHECK(parse_error_line("[other]\n") == 1);
  CHECK(parse_error_line("[plan\n") == 1);
  CHECK(parse_error_line("[plan]\nk = four\n") == 2);
  CHECK(parse_error_line("[plan]\nflavor = goe\n") == 2);
  CHECK(parse_error_line("[plan]\np_list = 2, 0.5\n") == 2);
  CHECK(parse_error_line("[plan]\nseed = -3\n") == 2);
  CHECK(parse_error_line("[plan]\njust text\n") == 2);
  CHECK(parse_error_line("[tolerances]\nascent = x\n") == 2);
}

TEST_CASE("Plan validation names the field") {
  CHECK(validation_field("[plan]\nk = 1\n") == "k");
  CHECK(validation_field("[plan]\nn_grid = 100, 50\n") == "n_grid");
  CHECK(validation_field("[plan]\ntrials = 0\n") == "trials");
  CHECK(validation_field("[plan]\nepsilon = 1\n") == "epsilon");
  CHECK(validation_field("[plan]\nrestarts = 3\n") == "restarts");
  CHECK(validation_field("[plan]\nmax_iters = 0\n") == "max_iters");
  CHECK(validation_field("[tolerances]\nascent = -1\n") == "tolerances.ascent");
}

TEST_CASE("Plan files") {
  const auto path = std::filesystem::temp_directory_path() / "freecp_plan_test.cfg";
  {
    std::ofstream f(path);
    f << kPlan;
  }
  CHECK(load_plan(path.string()) == parse_plan(kPlan));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_plan(path.string()), Error);
}

namespace {

Report sample_report() {
  Report r;
  r.kind = "test";
  r.plan = plan_json(ExperimentPlan{});
  r.seeds = {SeedSpec{1, 2}, SeedSpec{3, 4}};
  r.summary = {{"mean", 0.5}, {"ok", true}};
  r.columns = {"name", "value", "flag", "missing"};
  r.add_row({"plain", 1.25, true, nullptr});
  r.add_row({"with, comma \"quoted\"", -3, false, nullptr});
  r.add_row({"42", 1e-300, true, nullptr});
  return r;
}

}  // namespace

TEST_CASE("Report JSON round-trip") {
  Report r = sample_report();
  stamp_metadata(r);
  CHECK(r.metadata.contains("generated_at"));
  std::ostringstream os;
  write_json(r, os);
  const Report back = Report::from_json(Json::parse(os.str()));
  CHECK(back == r);
  Json wrong = r.to_json();
  wrong["schema_version"] = 99;
  CHECK_THROWS_AS(Report::from_json(wrong), Error);
  CHECK_THROWS_AS(r.add_row({1}), DimensionError);
}

TEST_CASE("Report CSV round-trip") {
  const Report r = sample_report();
  std::ostringstream os;
  write_csv(r, os);
  std::istringstream is(os.str());
  const Report back = read_csv(is);
  CHECK(back.columns == r.columns);
  REQUIRE(back.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(back.rows[i] == r.rows[i]);
  CHECK(back.rows[2][0].is_string());

  Report empty;
  empty.columns = {"a", "b"};
  std::ostringstream eo;
  write_csv(empty, eo);
  CHECK(eo.str() == "a,b\n");
}

TEST_CASE("Report content ignores metadata") {
  Report a = sample_report(), b = sample_report();
  a.metadata["generated_at"] = "x";
  b.metadata["generated_at"] = "y";
  CHECK(a.content_json() == b.content_json());
  CHECK_FALSE(a == b);
}

TEST_CASE("Report emission") {
  const Report r = sample_report();
  std::ostringstream os;
  emit(r, ReportFormat::csv, "-", os);
  CHECK(os.str().rfind("name,value,flag,missing\n", 0) == 0);
  CHECK_THROWS_AS(emit(r, ReportFormat::json, "/nonexistent-dir/x.json", os), Error);
  CHECK(parse_format("csv") == ReportFormat::csv);
  CHECK_THROWS_AS(parse_format("xml"), DomainError);
}
