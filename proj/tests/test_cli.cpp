#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include <jetcalc/cli.hpp>

using jetcalc::cli::run;
using nlohmann::json;

namespace
{

// stdout of the installed binary, exit status via `status`.
std::string run_binary(const std::string &args, int &status)
{
    const std::string cmd = std::string(JETCALC_BINARY) + " " + args + " 2>/dev/null";
    FILE *pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        status = -1;
        return {};
    }
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        out.append(buf.data(), n);
    }
    const int raw = pclose(pipe);
    status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return out;
}

void expect_single_line_json(const std::string &err)
{
    ASSERT_FALSE(err.empty());
    EXPECT_EQ(err.find('\n'), err.size() - 1) << err;
    EXPECT_TRUE(json::accept(err)) << err;
}

} // namespace

TEST(Cli, DeltaCurve)
{
    const auto r = run({"delta", "--N", "3", "--c", "2", "--a", "0", "--json"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["delta"], 3);
    EXPECT_EQ(j["difference_text"], "d1^2*d2 + d1*d2^2 - 4*d1*d2");
    EXPECT_EQ(j["dominant_check"], true);
}

TEST(Cli, DeltaText)
{
    const auto r = run({"delta", "--N", "3", "--c", "2", "--a", "1"});
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("difference = d1^2*d2 + d1*d2^2 - 5*d1*d2\n"), std::string::npos);
    EXPECT_NE(r.out.find("delta = 3 (cap 200)"), std::string::npos);
}

TEST(Cli, DeltaCapFromEnvironmentAndFlag)
{
    setenv("JETCALC_DELTA_MAX", "2", 1);
    const auto env = run({"delta", "--N", "3", "--c", "2", "--a", "0"});
    EXPECT_EQ(env.exit_code, 1);
    expect_single_line_json(env.err);
    const auto flag = run({"delta", "--N", "3", "--c", "2", "--a", "0", "--max", "3"});
    EXPECT_EQ(flag.exit_code, 0);
    setenv("JETCALC_DELTA_MAX", "lots", 1);
    const auto bad = run({"delta", "--N", "3", "--c", "2", "--a", "0"});
    EXPECT_EQ(bad.exit_code, 2);
    expect_single_line_json(bad.err);
    unsetenv("JETCALC_DELTA_MAX");
}

TEST(Cli, Degeneracy)
{
    const auto r = run({"degeneracy", "--N", "9", "--c", "3"});
    ASSERT_EQ(r.exit_code, 0);
    const json j = json::parse(r.out);
    EXPECT_EQ(j["locus_dim"], 0);
    EXPECT_EQ(j["hyperbolic"], true);
    EXPECT_EQ(run({"degeneracy", "--N", "3", "--c", "5"}).exit_code, 3);
}

TEST(Cli, SchurVerify)
{
    const auto r = run({"schur-verify", "--weight", "4"});
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("11/11 partitions pass"), std::string::npos);
    const auto j = json::parse(run({"schur-verify", "--weight", "3", "--json"}).out);
    EXPECT_EQ(j["failed"], 0);
    EXPECT_EQ(j["checked"], 6);
}

TEST(Cli, SegreAndIntegrate)
{
    const auto s = run({"segre", "--N", "3", "--c", "1", "--m", "0"});
    EXPECT_EQ(s.out, "s0 = 1\ns1 = d1 - 4\ns2 = -4*d1 + 10\n");
    const auto i = run({"integrate", "--N", "3", "--c", "2", "--level", "1", "integrate(1, (u(1)+2*h)^1)"});
    EXPECT_EQ(i.exit_code, 0);
    EXPECT_EQ(i.out, "d1^2*d2 + d1*d2^2 - 2*d1*d2\n");
    const auto ij = run({"integrate", "--N", "3", "--c", "2", "--level", "1", "u(1)", "--json"});
    EXPECT_EQ(json::parse(ij.out)["text"], "d1^2*d2 + d1*d2^2 - 4*d1*d2");
}

TEST(Cli, Positivity)
{
    const auto ok = run({"positivity", "--N", "4", "--c", "2", "--a", "0", "--json"});
    EXPECT_EQ(ok.exit_code, 0);
    EXPECT_EQ(json::parse(ok.out)["D"], 9);
    const auto pre = run({"positivity", "--N", "3", "--c", "1", "--a", "0"});
    EXPECT_EQ(pre.exit_code, 3);
    expect_single_line_json(pre.err);
    EXPECT_EQ(json::parse(pre.err)["error"], "precondition");
}

TEST(Cli, Audit)
{
    const auto r = run({"audit", "--N", "3", "--c", "1", "--json"});
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(json::parse(r.out)["ok"], true);
}

TEST(Cli, ParseErrorsExitTwoWithPosition)
{
    const std::vector<std::string> bad{"u(1) +", "h $", "(h", "u(3)", "s(1 2)", "-h", "h^", ""};
    for (const auto &src : bad) {
        const auto r = run({"integrate", "--N", "5", "--c", "2", "--level", "2", "--", src});
        EXPECT_EQ(r.exit_code, 2) << src;
        EXPECT_TRUE(r.out.empty());
        expect_single_line_json(r.err);
        const json j = json::parse(r.err);
        EXPECT_TRUE(j.contains("line")) << src;
        EXPECT_TRUE(j.contains("column")) << src;
    }
    const json lvl = json::parse(run({"integrate", "--N", "5", "--c", "2", "--level", "2", "h*u(3)"}).err);
    EXPECT_EQ(lvl["error"], "level-out-of-range");
    EXPECT_EQ(lvl["column"], 3);
}

TEST(Cli, UsageErrors)
{
    const std::vector<std::vector<std::string>> cases{
        {},
        {"nonsense"},
        {"delta", "--N", "3"},
        {"delta", "--N", "x", "--c", "1", "--a", "0"},
        {"segre", "--N", "3", "--c", "1", "--m", "0", "--bogus"},
        {"schur-verify", "--weight", "40"},
        {"delta", "--N", "3", "--c", "2", "--a", "0", "--max", "-4"},
    };
    for (const auto &args : cases) {
        const auto r = run(args);
        EXPECT_EQ(r.exit_code, 2);
        expect_single_line_json(r.err);
    }
}

TEST(Cli, PreconditionErrors)
{
    EXPECT_EQ(run({"delta", "--N", "3", "--c", "3", "--a", "0"}).exit_code, 3);
    EXPECT_EQ(run({"delta", "--N", "3", "--c", "2", "--a", "-1"}).exit_code, 3);
    EXPECT_EQ(run({"integrate", "--N", "3", "--c", "2", "--level", "2", "h"}).exit_code, 3);
}

TEST(Cli, InProcessDeterminism)
{
    const std::vector<std::string> args{"positivity", "--N", "6", "--c", "3", "--a", "1", "--json"};
    const auto a = run(args);
    const auto b = run(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.err, b.err);
}

TEST(Cli, BinaryRunsAreByteIdentical)
{
    for (const std::string args :
         {"delta --N 4 --c 2 --a 1 --json", "audit --N 4 --c 2", "segre --N 5 --c 2 --m 3 --json",
          "integrate --N 4 --c 1 --level 2 \"l(1)^2*l(2)^2\""}) {
        int s1 = 0;
        int s2 = 0;
        const std::string first = run_binary(args, s1);
        const std::string second = run_binary(args, s2);
        EXPECT_EQ(s1, 0) << args;
        EXPECT_EQ(s1, s2);
        EXPECT_FALSE(first.empty()) << args;
        EXPECT_EQ(first, second) << args;
    }
}
