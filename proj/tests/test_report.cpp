#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "hermann/catalog.hpp"
#include "hermann/report.hpp"

using namespace hermann;
using report::Json;

TEST(Report, NumberFormatting) {
  EXPECT_EQ(report::format_number(0.0), "0");
  EXPECT_EQ(report::format_number(-0.0), "0");
  EXPECT_EQ(report::format_number(std::numeric_limits<double>::quiet_NaN()), "null");
  EXPECT_EQ(report::format_number(1.5), "1.5");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(report::format_number(x)), x);
}

TEST(Report, JsonLayoutIsStable) {
  Json j;
  j["a"] = 1;
  j["v"] = report::vec_json(Vec::LinSpaced(3, 0.0, 1.0));
  j["s"] = "x";
  const std::string want = "{\n  \"a\": 1,\n  \"v\": [0, 0.5, 1],\n  \"s\": \"x\"\n}\n";
  EXPECT_EQ(report::to_json_string(j), want);
  EXPECT_EQ(report::to_json_string(j), report::to_json_string(Json::parse(report::to_json_string(j))));
}

TEST(Report, CsvFlattening) {
  Json j;
  j["r"] = {{"x", 0.25}, {"l", {1, 2}}};
  j["name"] = "a,b";
  EXPECT_EQ(report::to_csv_string(j), "key,value\nr.x,0.25\nr.l[0],1\nr.l[1],2\nname,\"a,b\"\n");
}

TEST(Report, TriadRoundTrip) {
  const TriadSpec s = catalog::make_unitary_on_grassmannian(1, 2);
  const TriadSpec back = report::triad_from_json(Json::parse(report::to_json_string(report::triad_to_json(s))));
  EXPECT_EQ(back.n, s.n);
  EXPECT_EQ(back.name, s.name);
  EXPECT_EQ((back.sigma1 - s.sigma1).norm(), 0.0);
  EXPECT_EQ((back.sigma2 - s.sigma2).norm(), 0.0);
  ASSERT_EQ(back.t_frame.size(), s.t_frame.size());
  EXPECT_TRUE(back.commuting_expected);
}

TEST(Report, MalformedTriads) {
  EXPECT_THROW(report::triad_from_json(Json::array()), TriadFormatError);
  EXPECT_THROW(report::triad_from_json(Json::parse(R"({"n": 3})")), TriadFormatError);
  // not orthogonal
  EXPECT_THROW(report::triad_from_json(Json::parse(
                   R"({"n": 3, "sigma1_conjugator": [[2,0,0],[0,1,0],[0,0,1]], "sigma2_conjugator": [[1,0,0],[0,1,0],[0,0,1]]})")),
               TriadFormatError);
  // orthogonal but C² ≠ ±I
  EXPECT_THROW(report::triad_from_json(Json::parse(
                   R"({"n": 3, "sigma1_conjugator": [[0,-1,0],[1,0,0],[0,0,1]], "sigma2_conjugator": [[1,0,0],[0,1,0],[0,0,1]]})")),
               TriadFormatError);
  // wrong shape
  EXPECT_THROW(report::triad_from_json(Json::parse(
                   R"({"n": 3, "sigma1_conjugator": [[1,0],[0,1]], "sigma2_conjugator": [[1,0,0],[0,1,0],[0,0,1]]})")),
               TriadFormatError);
}

TEST(Report, TriadFiles) {
  const std::string path = ::testing::TempDir() + "bad_triad.json";
  {
    std::ofstream f(path);
    f << "{ not json";
  }
  EXPECT_THROW(report::load_triad_file(path), TriadFormatError);
  std::remove(path.c_str());
  EXPECT_THROW(report::load_triad_file(path), InputError);
}
