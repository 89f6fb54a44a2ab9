#include <gtest/gtest.h>

#include <sstream>

#include "rcp/config.hpp"
#include "rcp/table.hpp"

namespace {

TEST(Table, CsvCells) {
  rcp::Table t;
  t.columns = {"a", "b", "c", "d", "e", "f"};
  t.add({4.0 - 3.6, std::string("x,y"), true, std::int64_t{-3}, std::string(""), rcp::IntList{{4}}});
  t.add({1e-20, std::string("say \"hi\""), false, std::uint64_t{7}, std::string("plain"), rcp::IntList{}});
  t.notes.push_back("done");
  std::ostringstream os;
  rcp::write_csv(os, t);
  EXPECT_EQ(os.str(),
            "a,b,c,d,e,f\n"
            "0.4,\"x,y\",true,-3,\"\",\"4\"\n"
            "1e-20,\"say \"\"hi\"\"\",false,7,plain,\"\"\n"
            "# done\n");
  EXPECT_THROW(t.add({1.0}), rcp::StateError);
}

TEST(Table, DoubleFormat) {
  EXPECT_EQ(rcp::format_double(3.6), "3.6");
  EXPECT_EQ(rcp::format_double(2.0 + 1.6), "3.6");
  EXPECT_EQ(rcp::format_double(1e6), "1000000");
  EXPECT_EQ(rcp::format_cell(rcp::IntList{{3, 4}}), "\"3,4\"");
}

TEST(Config, ParsesFlatKeys) {
  std::istringstream in("# comment\nseed = 7\n\n dist.alpha=0.6  # trailing\ngraphs = complete:2, complete:6\n");
  const auto c = rcp::Config::parse(in);
  EXPECT_EQ(c.get_uint("seed"), 7u);
  EXPECT_EQ(c.get_double("dist.alpha"), 0.6);
  EXPECT_EQ(c.get("graphs"), "complete:2, complete:6");
  EXPECT_FALSE(c.has("workers"));
  EXPECT_EQ(c.get("workers"), std::nullopt);
}

TEST(Config, ReportsBadLines) {
  std::istringstream in("seed = 7\noops\n");
  try {
    rcp::Config::parse(in, "run.cfg");
    FAIL();
  } catch (const rcp::InputError& e) {
    EXPECT_EQ(std::string(e.what()), "run.cfg:2: expected `key = value`");
  }
  std::istringstream num("seed = x\nalpha = 0.7z\n");
  const auto c = rcp::Config::parse(num);
  EXPECT_THROW(c.get_uint("seed"), rcp::InputError);
  EXPECT_THROW(c.get_double("alpha"), rcp::InputError);
  EXPECT_THROW(rcp::Config::load("/nonexistent/rcp.cfg"), rcp::InputError);
}

}  // namespace
