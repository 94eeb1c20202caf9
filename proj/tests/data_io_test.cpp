#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

using namespace sphanova;

namespace {

ParsedData parse_csv(const std::string& text) {
    std::istringstream in(text);
    return read_data(in, DataFormat::Csv);
}

Errc error_of(const std::string& text) {
    try {
        parse_csv(text);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InternalConsistency;
}

} // namespace

TEST(DataIoTest, TwoGroupsOfThree) {
    const auto pd = parse_csv("group,x1,x2,x3\n"
                              "a,1,0,0\n# comment\nb,0,1,0\na,0,0,1\nb,0,0,1\na,0,1,0\nb,1,0,0\n");
    ASSERT_EQ(pd.sample.groups(), 2u);
    EXPECT_EQ(pd.sample.label(0), "a");
    EXPECT_EQ(pd.sample.label(1), "b");
    EXPECT_EQ(pd.sample.size(0), 3u);
    EXPECT_EQ(pd.sample.size(1), 3u);
    EXPECT_EQ(pd.sample.group(0).col(1), Vector::Unit(3, 2));
    EXPECT_EQ(pd.renormalized, 0u);
}

TEST(DataIoTest, NearUnitRowsAreRenormalized) {
    const auto pd = parse_csv("group,x1,x2,x3\n1,1.0000004,0,0\n1,0,1,0\n2,0,0,1\n");
    EXPECT_EQ(pd.sample.group(0)(0, 0), 1.0);
    EXPECT_EQ(pd.sample.size(0), 2u);
}

TEST(DataIoTest, RenormalizationsAboveToleranceAreCounted) {
    const auto pd = parse_csv("group,x1,x2,x3\n1,1.0002,0,0\n1,0,1,0\n2,0,0,1.0000004\n");
    EXPECT_EQ(pd.renormalized, 1u);
    EXPECT_NEAR(pd.sample.group(0).col(0).norm(), 1.0, 1e-15);
}

TEST(DataIoTest, InputErrors) {
    EXPECT_EQ(error_of("group,x1,x2,x3\n1,0.9,0,0\n2,0,1,0\n"), Errc::NonUnitRow);
    EXPECT_EQ(error_of("group,x1,x2,x3\n1,1,0,0\n2,0,1\n"), Errc::MixedDimensions);
    EXPECT_EQ(error_of("group,x1,x2\n1,1,0\n1,0,1\n"), Errc::TooFewGroups);
    EXPECT_EQ(error_of("group,x1,x2\n1,1,zero\n2,0,1\n"), Errc::ParseError);
    EXPECT_EQ(error_of("label,x1,x2\n1,1,0\n2,0,1\n"), Errc::ParseError);
    try {
        parse_csv("group,x1,x2\n1,1,0\n2,0.6,0.6\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("row 1 has norm"), std::string::npos);
    }
}

TEST(DataIoTest, JsonFormats) {
    const std::string rows = R"([{"group":"north","x":[0,0,1]},{"group":"south","x":[0,1,0]},{"group":"north","x":[1,0,0]}])";
    for (const std::string& text : {rows, R"({"rows":)" + rows + "}"}) {
        std::istringstream in(text);
        const auto pd = read_data(in, DataFormat::Json);
        EXPECT_EQ(pd.sample.groups(), 2u);
        EXPECT_EQ(pd.sample.size(0), 2u);
        EXPECT_EQ(pd.sample.label(1), "south");
    }
    std::istringstream bad("[{\"group\":1}]");
    EXPECT_THROW(read_data(bad, DataFormat::Json), Error);
}

TEST(DataIoTest, FormatFromPath) {
    EXPECT_EQ(format_from_path("data.JSON"), DataFormat::Json);
    EXPECT_EQ(format_from_path("data.csv"), DataFormat::Csv);
    EXPECT_EQ(format_from_path("data"), DataFormat::Csv);
}

TEST(DataIoTest, WriteReadRoundTrip) {
    RngStream rng(9, 0);
    const auto ms = testing_support::null_sample(
        {TildeLaw(AngularModel::fvml(2), 4), TildeLaw(AngularModel::lin(2), 4)}, {15, 20}, UnitVector{0.5, 0.5, 0.5, 0.5}, rng);
    std::ostringstream out;
    write_csv(out, ms);
    const auto back = parse_csv(out.str());
    ASSERT_EQ(back.sample.groups(), 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_LT((back.sample.group(i) - ms.group(i)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(back.renormalized, 0u);
}

TEST(DataIoTest, MissingFile) {
    EXPECT_THROW(parse_data("/nonexistent/file.csv", DataFormat::Csv), Error);
}
