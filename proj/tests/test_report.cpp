#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "ddsim/report.hpp"

using namespace ddsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ddsim_test_report";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Report, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Report, CsvRoundTrip) {
  CsvTable t;
  t.header = {"t", "s", "q"};
  t.rows = {{0, 1, 0}, {1e-3, 0.999999999999, -1.5e-17}, {2.5, -0.25, 1.0 / 7.0}};
  const fs::path path = scratch("round.csv");
  write_csv(path, t);
  const CsvTable back = read_csv(path);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.column("q"), 2u);
  EXPECT_THROW(back.column("x"), std::out_of_range);
}

TEST(Report, MalformedCsvThrows) {
  const fs::path path = scratch("bad.csv");
  {
    std::ofstream out(path);
    out << "a,b\n1,2\n3\n";
  }
  EXPECT_THROW(read_csv(path), std::runtime_error);
  {
    std::ofstream out(path);
    out << "a,b\n1,x\n";
  }
  EXPECT_THROW(read_csv(path), std::runtime_error);
  EXPECT_THROW(read_csv(scratch("missing.csv")), std::runtime_error);
}

TEST(Report, KeyValuesRoundTrip) {
  const KeyValues kv{{"n", "500"}, {"slope", "1.25"}, {"note", "a = b"}};
  const fs::path path = scratch("kv.txt");
  write_key_values(path, kv);
  EXPECT_EQ(read_key_values(path), kv);
}

TEST(Report, WriteFailureThrows) {
  EXPECT_THROW(write_text("/nonexistent_dir/x/y.txt", "z"), std::runtime_error);
}
