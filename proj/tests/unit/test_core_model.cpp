#include "dcor/code_io.hpp"
#include "dcor/code_matrix.hpp"
#include "dcor/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace dcor;

namespace {

CodeMatrix shifted_pair() { return CodeMatrix::from_rows({{1, 1, 1, -1}, {1, -1, 1, 1}}); }

} // namespace

TEST(CodeMatrix, StartsAllOnes) {
    const CodeMatrix x(3, 5);
    for (auto v : x.data()) EXPECT_EQ(v, 1);
    EXPECT_EQ(x.size(), 15u);
}

TEST(CodeMatrix, RejectsDegenerateShapes) {
    EXPECT_THROW(CodeMatrix(0, 4), InvalidArgument);
    EXPECT_THROW(CodeMatrix(1, 1), InvalidArgument);
    EXPECT_THROW(CodeMatrix::from_rows({{1, 0, 1}}), InvalidArgument);
    EXPECT_THROW(CodeMatrix::from_rows({{1, 1}, {1, 1, 1}}), InvalidArgument);
    EXPECT_THROW(CodeMatrix::from_rows({}), InvalidArgument);
}

TEST(CodeMatrix, FlipNegatesOneEntry) {
    auto x = shifted_pair();
    const auto before = x;
    flip_bit(x, {0, 0});
    EXPECT_EQ(x(0, 0), -1);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 4; ++b)
            if (a || b) EXPECT_EQ(x(a, b), before(a, b));
}

TEST(CodeMatrix, FlipMakesSecondCodeConstant) {
    auto x = shifted_pair();
    flip_bit(x, {1, 1});
    for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(x(1, b), 1);
}

TEST(CodeMatrix, FlipIsAnInvolution) {
    auto x = random_code_matrix(4, 17, 3);
    const auto original = x;
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 17; ++b) {
            flip_bit(x, {a, b});
            flip_bit(x, {a, b});
            ASSERT_EQ(x, original);
        }
}

TEST(CodeMatrix, FlipRejectsOutOfRange) {
    auto x = shifted_pair();
    EXPECT_THROW(flip_bit(x, {2, 0}), InvalidArgument);
    EXPECT_THROW(flip_bit(x, {0, 4}), InvalidArgument);
    EXPECT_THROW((void)x.at({5, 5}), InvalidArgument);
}

TEST(RandomCodeMatrix, IsReproducible) {
    EXPECT_EQ(random_code_matrix(1, 4, 9), random_code_matrix(1, 4, 9));
    EXPECT_EQ(random_code_matrix(7, 33, 12345), random_code_matrix(7, 33, 12345));
}

TEST(RandomCodeMatrix, SeedsDiffer) {
    for (std::uint64_t s = 0; s < 20; ++s) EXPECT_NE(random_code_matrix(4, 16, s), random_code_matrix(4, 16, s + 1));
}

TEST(RandomCodeMatrix, HasRequestedShapeAndValues) {
    const auto x = random_code_matrix(63, 1023, 1);
    EXPECT_EQ(x.size(), 64449u);
    long plus = 0;
    for (auto v : x.data()) {
        ASSERT_TRUE(v == 1 || v == -1);
        plus += v == 1;
    }
    // Fair coin: within 5 sigma of half.
    EXPECT_NEAR(static_cast<double>(plus), 64449 / 2.0, 5 * std::sqrt(64449 / 4.0));
}

TEST(RandomCodeMatrix, RejectsEmptyFamily) { EXPECT_THROW(random_code_matrix(0, 4, 1), InvalidArgument); }

TEST(Constraints, AlternatingCode) {
    const auto x = CodeMatrix::from_rows({{1, -1, 1, -1}});
    const auto r = check_constraints(x, {true, true});
    EXPECT_TRUE(r.codes[0].balanced_ok);
    EXPECT_EQ(r.codes[0].shift1, -4);
    EXPECT_FALSE(r.codes[0].acz_ok);
    EXPECT_FALSE(r.all_ok());
}

TEST(Constraints, ConstantCode) {
    const auto r = check_constraints(CodeMatrix(1, 4), {true, true});
    EXPECT_FALSE(r.codes[0].balanced_ok);
    EXPECT_EQ(r.codes[0].shift1, 4);
    EXPECT_FALSE(r.codes[0].acz_ok);
}

TEST(Constraints, HalfBlockCode) {
    const auto r = check_constraints(CodeMatrix::from_rows({{1, 1, -1, -1}}), {true, true});
    EXPECT_TRUE(r.codes[0].balanced_ok);
    EXPECT_EQ(r.codes[0].shift1, 0);
    EXPECT_TRUE(r.codes[0].acz_ok);
    EXPECT_TRUE(r.all_ok());
}

TEST(Constraints, OddLengthTargetIsPlusMinusOne) {
    EXPECT_TRUE(acz_satisfied(1, 7));
    EXPECT_TRUE(acz_satisfied(-1, 7));
    EXPECT_FALSE(acz_satisfied(3, 7));
    EXPECT_TRUE(acz_satisfied(0, 8));
    EXPECT_FALSE(acz_satisfied(4, 8));
}

TEST(Constraints, UnrequestedChecksPass) {
    const auto r = check_constraints(CodeMatrix(2, 4), {});
    EXPECT_TRUE(r.all_ok());
    EXPECT_EQ(r.codes[1].row_sum, 4);
}

TEST(Constraints, BalancedIffRowSumZero) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto x = random_code_matrix(3, 10, s);
        const auto r = check_constraints(x, {true, false});
        for (std::size_t i = 0; i < 3; ++i) {
            long sum = 0;
            for (auto v : x.row(i)) sum += v;
            EXPECT_EQ(r.codes[i].balanced_ok, sum == 0);
        }
    }
}

TEST(Constraints, Shift1MatchesDefinition) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto x = random_code_matrix(1, 11, s);
        long v = 0;
        for (std::size_t t = 0; t < 11; ++t) v += x(0, t) * x(0, (t + 10) % 11);
        EXPECT_EQ(shift1_autocorrelation(x.row(0)), v);
    }
}

TEST(Constraints, ValidationRejectsImpossibleSetups) {
    EXPECT_THROW(validate_constraints({true, false}, 1023), InfeasibleError);
    EXPECT_THROW(validate_constraints({false, true}, 10), InfeasibleError);
    EXPECT_NO_THROW(validate_constraints({true, true}, 128));
    EXPECT_NO_THROW(validate_constraints({false, true}, 127));
}

TEST(CodeIo, ParsesCsvLine) {
    std::istringstream in("1,-1,1,1\n");
    const auto x = read_csv(in);
    EXPECT_EQ(x, CodeMatrix::from_rows({{1, -1, 1, 1}}));
}

TEST(CodeIo, RejectsBadCsv) {
    for (const char* text : {"1,0,1\n", "1,1\n1,1,1\n", "", "1,,1\n", "1,x\n"}) {
        std::istringstream in(text);
        EXPECT_THROW(read_csv(in), FormatError) << text;
    }
}

TEST(CodeIo, RoundTripsBothFormats) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = random_code_matrix(5, 31 + s, s);
        std::stringstream csv, prn;
        write_csv(csv, x);
        write_prn(prn, x);
        EXPECT_EQ(read_csv(csv), x);
        EXPECT_EQ(read_prn(prn), x);
    }
}

TEST(CodeIo, PrnLayout) {
    const auto x = CodeMatrix::from_rows({{1, -1, 1, 1, -1, -1, -1, -1, 1, 1}});
    std::stringstream out;
    write_prn(out, x);
    const std::string bytes = out.str();
    ASSERT_EQ(bytes.size(), 16u + 2u);
    EXPECT_EQ(bytes.substr(0, 4), "DCOR");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1);
    EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 10);
    EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 0b10110000);
    EXPECT_EQ(static_cast<unsigned char>(bytes[17]), 0b11000000);
}

TEST(CodeIo, RejectsBadPrn) {
    const auto x = random_code_matrix(2, 12, 1);
    std::stringstream out;
    write_prn(out, x);
    const std::string good = out.str();

    auto rejects = [](std::string bytes) {
        std::istringstream in(bytes);
        EXPECT_THROW(read_prn(in), FormatError);
    };
    rejects(good.substr(0, good.size() - 1));
    rejects(good + "x");
    std::string magic = good;
    magic[0] = 'X';
    rejects(magic);
    std::string version = good;
    version[4] = 2;
    rejects(version);
    rejects(good.substr(0, 10));
}

TEST(CodeIo, LoadSniffsFormat) {
    const auto dir = std::filesystem::temp_directory_path() / "dcor_io_test";
    std::filesystem::create_directories(dir);
    const auto x = random_code_matrix(3, 20, 4);
    save_codes(dir / "a.csv", x, CodeFormat::Csv);
    save_codes(dir / "a.prn", x, CodeFormat::Prn);
    EXPECT_EQ(load_codes(dir / "a.csv"), x);
    EXPECT_EQ(load_codes(dir / "a.prn"), x);
    std::filesystem::remove_all(dir);
}

TEST(CodeIo, FormatNames) {
    EXPECT_EQ(parse_code_format("csv"), CodeFormat::Csv);
    EXPECT_EQ(parse_code_format("prn"), CodeFormat::Prn);
    EXPECT_FALSE(parse_code_format("txt"));
    EXPECT_EQ(extension(CodeFormat::Prn), "prn");
}
