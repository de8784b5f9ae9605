#include <gtest/gtest.h>

#include <fstream>

#include "smlmc/format.hpp"
#include "temp_dir.hpp"

namespace {

using namespace smlmc;

TEST(FormatFixed, FourDecimalsAndNegativeZero) {
    EXPECT_EQ(format_coord(1.0), "1.0000");
    EXPECT_EQ(format_coord(-0.0), "0.0000");
    EXPECT_EQ(format_coord(-0.00001), "0.0000");
    EXPECT_EQ(format_coord(-12.34567), "-12.3457");
    EXPECT_EQ(format_coord(499.99995), "500.0000");
    EXPECT_EQ(format_fixed(0.5, 6), "0.500000");
}

TEST(QuantizeCoord, IsAFixedPointOfFormatting) {
    for (double v : {0.0, 1.23456789, -3.99999, 250.00005, 1e-7, 499.123449999}) {
        const double q = quantize_coord(v);
        EXPECT_EQ(quantize_coord(q), q);
        double parsed = 0.0;
        ASSERT_TRUE(parse_double(format_coord(v), parsed));
        EXPECT_EQ(parsed, q) << v;
    }
}

TEST(Parse, RejectsPartialAndEmptyFields) {
    std::int64_t i = 0;
    double d = 0.0;
    EXPECT_TRUE(parse_int("42", i));
    EXPECT_EQ(i, 42);
    EXPECT_TRUE(parse_int("-7", i));
    EXPECT_FALSE(parse_int("4x", i));
    EXPECT_FALSE(parse_int("", i));
    EXPECT_TRUE(parse_double("-1.5", d));
    EXPECT_EQ(d, -1.5);
    EXPECT_FALSE(parse_double("1.5.", d));
    EXPECT_FALSE(parse_double("", d));
}

TEST(SplitFields, KeepsEmptyFields) {
    const auto f = split_fields("a,,c,");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[0], "a");
    EXPECT_EQ(f[1], "");
    EXPECT_EQ(f[3], "");
}

TEST(Sha256, KnownDigests) {
    Sha256 empty;
    EXPECT_EQ(empty.hex_digest(),
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    Sha256 abc;
    abc.update("a");
    abc.update("bc");
    EXPECT_EQ(abc.hex_digest(),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HashingLineReader, LinesNumbersAndDigest) {
    test_support::TempDir dir("reader");
    const auto path = dir / "f.csv";
    std::string content = "h1\r\nrow2\n\nlast";
    // A long line that crosses the internal block boundary.
    content += "\n" + std::string(3u << 20, 'x') + "\nend\n";
    {
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    HashingLineReader reader(path);
    std::string_view line;
    ASSERT_TRUE(reader.next(line));
    EXPECT_EQ(line, "h1");
    EXPECT_EQ(reader.line_number(), 1u);
    ASSERT_TRUE(reader.next(line));
    EXPECT_EQ(line, "row2");
    ASSERT_TRUE(reader.next(line));
    EXPECT_EQ(line, "");
    ASSERT_TRUE(reader.next(line));
    EXPECT_EQ(line, "last");
    ASSERT_TRUE(reader.next(line));
    EXPECT_EQ(line.size(), 3u << 20);
    ASSERT_TRUE(reader.next(line));
    EXPECT_EQ(line, "end");
    EXPECT_EQ(reader.line_number(), 6u);
    EXPECT_FALSE(reader.next(line));

    Sha256 expected;
    expected.update(content);
    const std::string digest = reader.finish();
    EXPECT_EQ(digest, expected.hex_digest());
    EXPECT_EQ(sha256_file(path), digest);
}

}  // namespace
