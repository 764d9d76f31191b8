#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "nilnf/json_io.hpp"
#include "oracles.hpp"

using namespace nilnf;
using oracle::Gen;
using Q = RadScalar;
using P = Poly<Q>;
using VF = VectorField<Q>;

namespace {

struct Run {
  int rc = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& stdin_text = "") {
  std::string cmd = std::string(NILNF_CLI_PATH) + " " + args + " 2>/dev/null";
  if (!stdin_text.empty() || args.find("--input -") != std::string::npos) {
    auto path = std::filesystem::temp_directory_path() / "nilnf_cli_stdin.txt";
    std::ofstream(path) << stdin_text;
    cmd += " < " + path.string();
  }
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(NILNF_DATA_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const Json& j) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << j.dump();
  return path.string();
}

// Every object under a "verification" key must have passed.
bool verifications_pass(const Json& j) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k == "verification" && v.is_object() && v.value("status", "") == "failed") return false;
      if (!verifications_pass(v)) return false;
    }
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (!verifications_pass(v)) return false;
  }
  return true;
}

Json ok_json(const std::string& args) {
  Run r = run(args);
  INFO(args);
  REQUIRE(r.rc == 0);
  Json j = Json::parse(r.out);
  REQUIRE(verifications_pass(j));
  return j;
}

}  // namespace

TEST_CASE("JSON round trips for scalars, polynomials and fields") {
  Gen g(60);
  for (int i = 0; i < 30; ++i) {
    Q x = g.radical();
    REQUIRE(rad_from_json(to_json(x)) == x);
    P p = g.poly(3, 0, 3, 0.5);
    REQUIRE(poly_from_json<Q>(to_json(p)) == p);
    REQUIRE(to_json(poly_from_json<Q>(to_json(p))) == to_json(p));
    VF v = g.field(2, 1, 3, 0.5);
    REQUIRE(vfield_from_json<Q>(to_json(v)) == v);
  }
  Poly<double> fp = Poly<double>::variable(2, 0) * 0.25;
  CHECK(poly_from_json<double>(to_json(fp)) == fp);
}

TEST_CASE("scalar JSON accepts integers, rational strings and unreduced radicands") {
  CHECK(rad_from_json(Json(3)) == Q(3));
  CHECK(rad_from_json(Json("-6/4")) == Q(Rational(-3, 2)));
  CHECK(rad_from_json(Json::parse(R"({"terms":[{"rad":8,"num":"1","den":"2"}]})")) == Q::sqrt(2));
  CHECK_THROWS_AS(rad_from_json(Json(0.5)), ParseError);
  CHECK_THROWS_AS(rad_from_json(Json("1/0")), ParseError);
  CHECK_THROWS_AS(rad_from_json(Json::parse(R"({"terms":[{"rad":0,"num":"1"}]})")), ParseError);
}

TEST_CASE("cli exit codes") {
  CHECK(run("").rc == 2);
  CHECK(run("--help").rc == 0);
  CHECK(run("no-such-command").rc == 2);
  CHECK(run("normalize --jordan 3 --input -", " \n").rc == 2);
  CHECK(run("normalize --jordan 3 --input " + data("missing.json")).rc == 2);
  CHECK(run("sl2-decompose --jordan 3,1 --degree 2").rc == 3);
  CHECK(run("sl2-decompose --jordan x --degree 2").rc == 2);
  CHECK(run("normalize --jordan 3 --input " + data("perturbation3.json")).rc == 3);
  CHECK(run("first-integrals --cap 2").rc == 2);
}

TEST_CASE("cli sl2-decompose") {
  Json j = ok_json("sl2-decompose --jordan 2 --space poly --degree 2");
  const auto& chains = j["decomposition"]["chains"];
  REQUIRE(chains.size() == 1);
  CHECK(chains[0]["weight"] == 2);
  CHECK(j["decomposition"]["dim"] == 3);
  Json v = ok_json("sl2-decompose --jordan 2 --space vf --degree 1");
  int total = 0;
  for (const auto& c : v["decomposition"]["chains"]) total += c["weight"].get<int>() + 1;
  CHECK(v["decomposition"]["chains"].size() == 2);
  CHECK(total == 4);
}

TEST_CASE("cli first-integrals") {
  Json j = ok_json("first-integrals --jordan 3 --cap 4");
  REQUIRE(j["basis"].size() == 2);
  P h = poly_from_json<Q>(j["basis"][0]);
  CHECK(echelon_polys<Q>({h, oracle::h3()}, 3, 2, 2).size() == 1);
  Json s = ok_json("first-integrals --field " + data("system_star.json") + " --cap 6");
  for (const auto& f : s["basis"]) {
    P p = poly_from_json<Q>(f);
    CHECK(p.derive(0).is_zero());
    CHECK(p.derive(1).is_zero());
  }
}

TEST_CASE("cli normalize with both drivers, round-tripping the output") {
  std::string base = "normalize --jordan 3 --coordinates jordan --input " + data("perturbation3.json") + " --order 6";
  Json d = ok_json(base + " --driver degreewise");
  Json n = ok_json(base + " --driver newton");
  CHECK(d["verification"]["status"] == "exact-zero");
  CHECK(d["normal_form"] == n["normal_form"]);
  VF nf = vfield_from_json<Q>(d["normal_form"]);
  CHECK(to_json(nf) == d["normal_form"]);
  Json f = ok_json("--mode float " + base);
  CHECK(f["verification"]["status"] != "failed");
}

TEST_CASE("cli output is deterministic") {
  std::string args = "normalize --jordan 3 --coordinates jordan --input " + data("perturbation3.json") + " --order 5";
  CHECK(run(args).out == run(args).out);
  CHECK(run("first-integrals --jordan 3 --cap 6").out == run("first-integrals --jordan 3 --cap 6").out);
}

TEST_CASE("cli newton-step, cohom-solve, check-condition, radii, bounds") {
  const auto& t = build_triple<Q>(JordanType{{3}});
  Gen g(61);
  std::string nf = write_temp("nilnf_nf.json", to_json(t.N));
  std::string rem = write_temp("nilnf_rem.json", to_json(g.field(3, 3, 4, 0.3)));
  Json s = ok_json("newton-step --jordan 3 --nf " + nf + " --remainder " + rem + " --m 2");
  CHECK(s["verification"]["status"] == "exact-zero");

  std::string z = write_temp("nilnf_z.json", to_json(apply_d0(t, g.field(3, 3, 4, 0.3))));
  Json c = ok_json("cohom-solve --jordan 3 --m 2 --z " + z);
  CHECK(c["verification"]["status"] == "exact-zero");

  std::string good = write_temp("nilnf_good.json", to_json(t.N + oracle::h3() * t.Nstar));
  Json cc = ok_json("check-condition --jordan 3 --input " + good);
  CHECK(cc["condition"]["holds"] == true);

  Json r = ok_json("radii --jordan 3 --kmax 30");
  CHECK(r["tail_checked"] == true);
  CHECK(r["tail_verified"] == true);
  Json shortrun = ok_json("radii --jordan 3 --kmax 3");
  CHECK(shortrun["tail_checked"] == false);
  ok_json("bounds --jordan 3 --m 2");
  CHECK(run("radii --r 0.4 --d 1").rc == 3);
}
