#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "atomwave/config.hpp"
#include "atomwave/csv.hpp"

using namespace atomwave;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Numerical;
}

}  // namespace

TEST(Config, DefaultsMatchSchema) {
  const Config c;
  EXPECT_EQ(c.real("system.n"), 3000);
  EXPECT_EQ(c.real("system.delta"), 24);
  EXPECT_EQ(c.integer("run.seed"), 1);
  EXPECT_FALSE(c.boolean("lyapunov.dimension"));
  EXPECT_EQ(c.text("integrator.method"), "dopri5");
}

TEST(Config, RoundTripIsLossless) {
  Config c;
  c.set("system.n", "12345.678901234567");
  c.set("initial.p", "1e-300");
  c.set("run.command", "bifurcation");
  c.set("lyapunov.dimension", "true");
  const Config back = Config::from_string(c.to_ini());
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.to_ini(), c.to_ini());
  EXPECT_EQ(back.real("system.n"), 12345.678901234567);
}

TEST(Config, PartialFileKeepsDefaults) {
  const Config c = Config::from_string("[system]\nn = 24000\n; comment\n[scan]\nn_points = 5\n");
  EXPECT_EQ(c.real("system.n"), 24000);
  EXPECT_EQ(c.integer("scan.n_points"), 5);
  EXPECT_EQ(c.real("system.delta"), 24);
}

TEST(Config, UnknownKeysAndSectionsAreRejected) {
  EXPECT_EQ(kind_of([] { Config::from_string("[system]\nbogus = 1\n"); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { Config::from_string("[nowhere]\nn = 1\n"); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { Config::from_string("n = 1\n"); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { Config().set("system.nn", "1"); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { Config().text("system.nn"); }), ErrorKind::Usage);
}

TEST(Config, TypesAreChecked) {
  Config c;
  EXPECT_EQ(kind_of([&] { c.set("system.n", "lots"); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([&] { c.set("run.seed", "1.5"); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([&] { c.set("lyapunov.dimension", "maybe"); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { Config::from_string("[system\nn = 1\n"); }), ErrorKind::Usage);
  EXPECT_EQ(c.real("system.n"), 3000);  // failed sets leave the value alone
}

TEST(Config, Overrides) {
  Config c;
  c.apply_override("system.delta=-24");
  c.apply_override(" scan.n_points = 7 ");
  EXPECT_EQ(c.real("system.delta"), -24);
  EXPECT_EQ(c.integer("scan.n_points"), 7);
  EXPECT_EQ(kind_of([&] { c.apply_override("system.delta"); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([&] { c.apply_override("delta=1"); }), ErrorKind::Usage);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_EQ(kind_of([] { Config::from_file("/nonexistent/atomwave.ini"); }), ErrorKind::Io);
}

TEST(Manifest, ContainsConfigResultsAndFailures) {
  Manifest m;
  m.command = "bifurcation";
  m.config.set("run.seed", "42");
  m.result("branches", 3.0);
  m.result("label", "Period(3)");
  m.outputs.push_back("out/bifurcation.csv");
  m.failed_cells.push_back({4, "integration failed\nat tau 12"});
  std::ostringstream os;
  m.write(os);
  const std::string s = os.str();
  EXPECT_NE(s.find("command = bifurcation"), std::string::npos);
  EXPECT_NE(s.find("code_version = " + std::string(kCodeVersion)), std::string::npos);
  EXPECT_NE(s.find("seed = 42"), std::string::npos);
  EXPECT_NE(s.find("status = warnings"), std::string::npos);
  EXPECT_NE(s.find("branches = 3"), std::string::npos);
  EXPECT_NE(s.find("cell4 = integration failed at tau 12"), std::string::npos);
  EXPECT_EQ(m.find_result("label"), "Period(3)");
  EXPECT_EQ(m.find_result("missing"), "");
  // the manifest is itself a loadable record of the configuration
  std::istringstream is(s);
  boost::property_tree::ptree tree;
  boost::property_tree::ini_parser::read_ini(is, tree);
  EXPECT_EQ(tree.get<std::string>("system.n"), "3000");
}

TEST(Csv, DoubleFormattingRoundTrips) {
  for (double x : {0.0, -0.0, 1.0 / 3, 1e-300, 6.02214076e23, -24.0, 0.1}) EXPECT_EQ(parse_double(format_double(x)), x);
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_TRUE(std::isnan(parse_double("nan")));
  EXPECT_THROW(parse_double("1.5x"), Error);
}

TEST(Csv, WriterChecksColumns) {
  std::ostringstream os;
  CsvWriter w(os, {"a", "b"});
  w.row({1, 2.5});
  w.row({"x", std::string("y")});
  EXPECT_EQ(os.str(), "a,b\n1,2.5\nx,y\n");
  EXPECT_THROW(w.row({1}), Error);
}
