#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <string>

#include "dbsplace/csv.hpp"

using namespace dbsplace;

TEST_SUITE_BEGIN("csv");

TEST_CASE("doubles round-trip through their shortest form") {
  for (double v : {0.0, 1.0, -3.25, 0.1, 6.31e-13, 1.4962, 2e7, 1e-300}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2e7) == "2e+07");
}

TEST_CASE("writer emits header plus rows and lands atomically") {
  CsvWriter csv({"a", "b"});
  csv.add_row({"1", "x"});
  csv.add_row({"2", "y"});
  CHECK(csv.to_string() == "a,b\n1,x\n2,y\n");

  const auto path = std::filesystem::temp_directory_path() / "dbsplace_csv_test.csv";
  std::filesystem::remove(path);
  csv.write_to(path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
}

TEST_SUITE_END();
