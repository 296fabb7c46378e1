#include <sstream>

#include "doctest.h"

#include "apt_lab/cli.hpp"
#include "apt_lab/json_util.hpp"

using namespace apt_lab;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kTable3 = std::string(APT_LAB_DATA_DIR) + "/table3.jsonl";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("tree") {
    auto r = run({"tree", "--primes", "2,3,5", "--root", "2,3", "--format", "dot"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("digraph", 0) == 0);
    auto j = run({"tree", "--primes", "2,3,5", "--root", "2,3"});
    CHECK(j.code == 0);
    auto parsed = Json::parse(j.out);
    CHECK(parsed["nodes"].size() == 11);
    CHECK(parsed["status"] == "exhausted");
    auto t = run({"tree", "--primes", "2,3,5,7,19", "--root", "2,325", "--node-cap", "50"});
    CHECK(t.code == 1);
    auto text = run({"tree", "--primes", "2,3", "--root", "2,3", "--format", "text"});
    CHECK(text.out == "(2,3)\n  L (2,5) leaf\n  R (5,3) leaf\n");
  }

  TEST_CASE("decide") {
    auto f = run({"decide", "--primes", "2,3,5"});
    CHECK(f.code == 0);
    auto j = Json::parse(f.out);
    CHECK(j["type"] == "finite");
    CHECK(j["L"] == 3);
    CHECK(j["C"] == 3);
    auto inf = run({"decide", "--primes", "2,3,5,7,19"});
    CHECK(inf.code == 0);
    auto ji = Json::parse(inf.out);
    CHECK(ji["type"] == "infinite");
    CHECK(ji.contains("certificate"));
    CHECK(ji["cycle"].size() >= 1);
  }

  TEST_CASE("certify") {
    auto nf = run({"certify", "--primes", "2,3,5", "--root", "2,3", "--depth", "40"});
    CHECK(nf.code == 1);
    CHECK(Json::parse(nf.out)["status"] == "not_found");
    auto ok = run({"certify", "--primes", "2,3,5,7,19", "--root", "2,325", "--depth", "40", "--pump", "3",
                   "--lift", "2,3,5,7,19,23"});
    CHECK(ok.code == 0);
    auto j = Json::parse(ok.out);
    CHECK(j["status"] == "found");
    CHECK(j["pumped"].size() == 3);
    CHECK(j["lifted"]["primes"].size() == 6);
    auto clash = run({"certify", "--verify", "x.json", "--primes", "2,3"});
    CHECK(clash.code == 2);
  }

  TEST_CASE("classify") {
    auto r = run({"classify", "--r", "3"});
    CHECK(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["l_r"] == 3);
    CHECK(j["exact"] == true);
    CHECK(run({"classify", "--r", "4", "--limit", "3"}).code == 1);
  }

  TEST_CASE("density") {
    auto c = run({"density", "c", "--primes", "2,3,5,7,19"});
    CHECK(c.code == 0);
    CHECK(Json::parse(c.out)["rational_part"]["denominator"] == "9953280");
    auto u = run({"density", "upper", "--catalog", kTable3});
    CHECK(u.code == 0);
    CHECK(Json::parse(u.out)["value"].get<std::string>().rfind("0.99999991", 0) == 0);
    auto l = run({"density", "lower", "--catalog", kTable3, "--certified", "5,6"});
    CHECK(l.code == 0);
    CHECK(run({"density", "lower", "--catalog", kTable3, "--certified", "6"}).code == 2);
  }

  TEST_CASE("reduce") {
    auto r = run({"reduce", "--k", "2", "--N", "36", "--primes", "2,3", "--j", "0", "--u", "2", "--v", "3"});
    CHECK(r.code == 0);
    CHECK(Json::parse(r.out).dump() ==
          R"({"terms":[{"j":0,"u":2,"v":5,"c":"1"},{"j":0,"u":5,"v":3,"c":"1"}]})");
    auto a = run({"reduce", "--k", "2", "--N", "900", "--primes", "2,3,5", "--acyclic"});
    CHECK(a.code == 0);
    CHECK(Json::parse(a.out)["result"] == "acyclic");
    CHECK(run({"reduce", "--k", "3", "--N", "36", "--primes", "2,3", "--j", "0", "--u", "2", "--v", "3"}).code == 2);
    CHECK(run({"reduce", "--k", "2", "--N", "36", "--primes", "2,3"}).code == 2);
  }

  TEST_CASE("catalog") {
    auto v = run({"catalog", "validate", "--file", kTable3});
    CHECK(v.code == 0);
    CHECK(Json::parse(v.out)["entries"] == 29);
    auto c = run({"catalog", "certify", "--file", kTable3, "--depth", "120"});
    CHECK(c.code == 0);
    CHECK(Json::parse(c.out)["certified"] == 29);
    auto ins = run({"catalog", "insert", "--file", kTable3, "--primes", "2,3,5,7,19,23", "--root", "2,325"});
    CHECK(Json::parse(ins.out)["outcome"] == "rejected_superset");
    CHECK(run({"catalog", "validate", "--file", "/nonexistent.jsonl"}).code == 2);
  }

  TEST_CASE("usage errors and determinism") {
    CHECK(run({}).code == 2);
    CHECK(run({"tree", "--bogus"}).code == 2);
    CHECK(run({"tree", "--primes", "2,4", "--root", "2,3"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    auto a = run({"--jobs", "2", "decide", "--primes", "2,3,7"});
    auto b = run({"decide", "--primes", "2,3,7", "--jobs", "1"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}
