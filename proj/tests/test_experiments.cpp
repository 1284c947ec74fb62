#include "chns/experiments.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace chns;
namespace fs = std::filesystem;

TEST(Experiments, RegistryNamesAreUnique)
{
    std::set<std::string> names;
    for (const auto& e : experiment_registry())
        names.insert(e.name);
    EXPECT_EQ(names.size(), experiment_registry().size());
    EXPECT_EQ(names.count("mass_law"), 1u);
    EXPECT_EQ(names.count("elliptic"), 1u);
}

TEST(Experiments, UnknownNameThrows)
{
    EXPECT_THROW(run_experiment("no_such_experiment", {}), std::invalid_argument);
}

TEST(Experiments, ObservedOrder)
{
    EXPECT_DOUBLE_EQ(observed_order(4.0, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(observed_order(1.0, 0.5), 1.0);
}

TEST(Experiments, ReportPassesOnlyWhenEveryCheckPasses)
{
    ExperimentReport r;
    r.checks.push_back({"a", "p", 1.0, 2.0, "<=", true});
    r.checks.push_back({"b", "p", 5.0, 0.0, "record", true});
    EXPECT_TRUE(r.passed());
    r.checks.push_back({"c", "p", 3.0, 2.0, "<=", false});
    EXPECT_FALSE(r.passed());
    ASSERT_NE(r.find("c"), nullptr);
    EXPECT_EQ(r.find("zzz"), nullptr);
}

TEST(Experiments, OperatorsExperimentWritesReport)
{
    ExperimentOptions o;
    o.out_dir = fs::temp_directory_path() / "chns_exp_tests";
    fs::remove_all(o.out_dir);
    const ExperimentReport r = run_experiment("operators", o);
    EXPECT_TRUE(r.passed());
    const fs::path csv = o.out_dir / "operators" / "report.csv";
    ASSERT_TRUE(fs::exists(csv));
    std::ifstream is(csv);
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header, "check,measured,relation,threshold,pass,property");
    EXPECT_TRUE(fs::exists(o.out_dir / "operators" / "report.txt"));
}
