#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "rlsad/cli.hpp"
#include "rlsad/errors.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
	int code;
	std::string out;
	std::string err;
};

Result invoke(std::vector<std::string> args)
{
	args.insert(args.begin(), "rlsad");
	std::vector<const char *> argv;

	for (const std::string &a : args) {
		argv.push_back(a.c_str());
	}

	std::ostringstream out, err;
	const int code = rlsad::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
	return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p)
{
	std::ifstream in(p, std::ios::binary);
	return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test
{
protected:
	void SetUp() override
	{
		dir = fs::temp_directory_path() / ("rlsad_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
		fs::remove_all(dir);
		fs::create_directories(dir);
	}

	void TearDown() override { fs::remove_all(dir); }

	fs::path dir;
};

} // namespace

TEST_F(CliTest, MissingColumnExitsWithSchemaCode)
{
	std::ofstream(dir / "bad.csv") << "t,roll_cmd\n0,0\n0.04,0\n";
	const Result r = invoke({"detect", "--input", (dir / "bad.csv").string(), "--out", (dir / "out").string()});

	EXPECT_EQ(r.code, static_cast<int>(rlsad::ErrorCategory::Schema));
	EXPECT_NE(r.err.find("missing column"), std::string::npos);
}

TEST_F(CliTest, MissingInputExitsWithIoCode)
{
	const Result r = invoke({"detect", "--input", (dir / "nope.csv").string(), "--out", (dir / "out").string()});
	EXPECT_EQ(r.code, static_cast<int>(rlsad::ErrorCategory::Io));
	EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST_F(CliTest, OnsetBeyondDurationIsValidationError)
{
	const Result r = invoke({"simulate", "--out", dir.string(), "--fault", "stuck", "--target", "rudder", "--onset",
				 "50", "--duration", "40"});
	EXPECT_EQ(r.code, static_cast<int>(rlsad::ErrorCategory::Validation));
	EXPECT_TRUE(fs::is_empty(dir));
}

TEST_F(CliTest, BadArgumentsAreUsageErrors)
{
	EXPECT_NE(invoke({}).code, 0);
	EXPECT_NE(invoke({"detect", "--input", "x"}).code, 0);
	EXPECT_NE(invoke({"simulate", "--out", dir.string(), "--fault", "melt"}).code, 0);
	EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, SuiteIsReproducible)
{
	ASSERT_EQ(invoke({"simulate", "--suite", "--seed", "3", "--out", (dir / "a").string()}).code, 0);
	ASSERT_EQ(invoke({"simulate", "--suite", "--seed", "3", "--out", (dir / "b").string()}).code, 0);

	std::size_t files = 0;

	for (const auto &entry : fs::directory_iterator(dir / "a")) {
		++files;
		EXPECT_EQ(slurp(entry.path()), slurp(dir / "b" / entry.path().filename())) << entry.path();
	}

	EXPECT_EQ(files, 30u);
}

TEST_F(CliTest, SimulateDetectEvaluate)
{
	ASSERT_EQ(invoke({"simulate", "--out", (dir / "sim").string(), "--name", "cut", "--fault", "power_cut",
			  "--target", "airspeed", "--onset", "45", "--duration", "60", "--seed", "11"})
			  .code,
		  0);
	ASSERT_TRUE(fs::exists(dir / "sim" / "cut.csv"));
	ASSERT_TRUE(fs::exists(dir / "sim" / "cut.truth.csv"));

	const Result det = invoke({"detect", "--input", (dir / "sim").string(), "--out", (dir / "det").string()});
	ASSERT_EQ(det.code, 0) << det.err;
	EXPECT_TRUE(fs::exists(dir / "det" / "cut.events.csv"));
	EXPECT_TRUE(fs::exists(dir / "det" / "cut.airspeed.trace.csv"));
	EXPECT_NE(det.out.find("first_detection=airspeed@"), std::string::npos) << det.out;

	const Result ev = invoke({"evaluate", "--events", (dir / "det").string(), "--truth", (dir / "sim").string(),
				  "--report", (dir / "report.csv").string()});
	ASSERT_EQ(ev.code, 0) << ev.err;
	EXPECT_NE(ev.out.find("tp=1 fp=0 fn=0 tn=0"), std::string::npos) << ev.out;
	EXPECT_NE(slurp(dir / "report.csv").find("Custom,1,"), std::string::npos);
}

TEST_F(CliTest, MissingEventsFileMeansNoDetection)
{
	ASSERT_EQ(invoke({"simulate", "--out", (dir / "sim").string(), "--name", "quiet", "--duration", "30"}).code, 0);
	fs::create_directories(dir / "empty");

	const Result ev = invoke({"evaluate", "--events", (dir / "empty").string(), "--truth", (dir / "sim").string(),
				  "--report", (dir / "r.csv").string()});
	ASSERT_EQ(ev.code, 0) << ev.err;
	EXPECT_NE(ev.out.find("tn=1"), std::string::npos);
}

TEST_F(CliTest, TabFormatAndThresholdOverride)
{
	ASSERT_EQ(invoke({"simulate", "--out", (dir / "sim").string(), "--name", "q", "--duration", "20", "--format", "tsv"})
			  .code,
		  0);
	ASSERT_TRUE(fs::exists(dir / "sim" / "q.tsv"));
	EXPECT_NE(slurp(dir / "sim" / "q.tsv").find('\t'), std::string::npos);

	const Result det = invoke({"detect", "--input", (dir / "sim" / "q.tsv").string(), "--out", (dir / "det").string(),
				   "--threshold", "1e9", "--format", "tsv"});
	ASSERT_EQ(det.code, 0) << det.err;
	EXPECT_EQ(slurp(dir / "det" / "q.events.tsv"), "t\tchannel\tz\terr\n");
}

TEST_F(CliTest, SweepListsEveryThreshold)
{
	ASSERT_EQ(invoke({"simulate", "--out", (dir / "sim").string(), "--name", "s", "--fault", "stuck", "--target",
			  "rudder", "--onset", "30", "--duration", "45", "--value", "0.3"})
			  .code,
		  0);

	const Result r = invoke({"sweep", "--input", (dir / "sim").string(), "--thresholds", "4.5,1e9"});
	ASSERT_EQ(r.code, 0) << r.err;
	EXPECT_NE(r.out.find("\n4.5,1,"), std::string::npos) << r.out;
	EXPECT_NE(r.out.find("\n1000000000,1,0,0,0,1,0,"), std::string::npos) << r.out;
}
