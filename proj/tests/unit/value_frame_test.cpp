#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dsqa/error.hpp"
#include "dsqa/frame.hpp"
#include "dsqa/value.hpp"

using namespace dsqa;

TEST(Value, RealsNeverRenderAsIntegers) {
  EXPECT_EQ(render_real(1.0), "1.0");
  EXPECT_EQ(render_real(0.1), "0.1");
  EXPECT_EQ(render_real(-2.5), "-2.5");
  EXPECT_EQ(render_value(Value{std::int64_t{7}}), "7");
  EXPECT_EQ(render_value(Value{true}), "true");
  EXPECT_EQ(render_value(Value{Null{}}), std::string(kNullToken));
}

TEST(Value, RealRoundTripsThroughText) {
  for (double d : {0.1, 1.0 / 3.0, 1e-300, 123456789.123, -0.0, 5e20, 2.2250738585072014e-308}) {
    auto text = render_real(d);
    auto back = parse_value(text, ColumnType::Real);
    ASSERT_TRUE(std::holds_alternative<double>(back)) << text;
    EXPECT_EQ(std::get<double>(back), d) << text;
  }
}

TEST(Value, ParseRejectsMalformedText) {
  EXPECT_THROW(parse_value("12x", ColumnType::Integer), Error);
  EXPECT_THROW(parse_value("yes", ColumnType::Boolean), Error);
  EXPECT_THROW(parse_value("", ColumnType::Real), Error);
  EXPECT_TRUE(is_null(parse_value(kNullToken, ColumnType::Text)));
}

TEST(Value, EscapeRoundTrip) {
  std::string nasty = "a\\b\nc\rd\x1f" "e";
  auto escaped = escape_field(nasty);
  EXPECT_EQ(escaped.find('\n'), std::string::npos);
  EXPECT_EQ(escaped.find('\x1f'), std::string::npos);
  EXPECT_EQ(unescape_field(escaped), nasty);
}

TEST(Value, CompareOrdersNullNumbersText) {
  EXPECT_LT(compare_values(Null{}, std::int64_t{-5}), 0);
  EXPECT_LT(compare_values(std::int64_t{2}, 2.5), 0);
  EXPECT_EQ(compare_values(std::int64_t{2}, 2.0), 0);
  EXPECT_LT(compare_values(99.0, std::string("a")), 0);
  EXPECT_GT(compare_values(std::string("b"), std::string("a")), 0);
}

TEST(Value, FitsAndCoerce) {
  EXPECT_TRUE(value_fits(Null{}, ColumnType::Integer));
  EXPECT_FALSE(value_fits(std::string("x"), ColumnType::Integer));
  auto v = coerce_value(std::int64_t{3}, ColumnType::Real);
  EXPECT_EQ(std::get<double>(v), 3.0);
}

TEST(Frame, InferencePromotesMixedColumns) {
  auto f = make_frame({"a", "b", "c"}, {std::nullopt, std::nullopt, std::nullopt},
                      {{std::int64_t{1}, std::int64_t{1}, std::string("x")},
                       {2.5, Null{}, std::int64_t{3}}});
  EXPECT_EQ(f.columns[0].type, ColumnType::Real);
  EXPECT_EQ(f.columns[1].type, ColumnType::Integer);
  EXPECT_EQ(f.columns[2].type, ColumnType::Text);
  EXPECT_EQ(std::get<double>(f.rows[0][0]), 1.0);
  EXPECT_EQ(std::get<std::string>(f.rows[1][2]), "3");
}

TEST(Frame, DeclaredTypeWinsWhenValuesFit) {
  auto f = make_frame({"flag"}, {ColumnType::Boolean}, {{true}, {Null{}}});
  EXPECT_EQ(f.columns[0].type, ColumnType::Boolean);
}

TEST(Frame, CanonicalBytesRoundTrip) {
  auto f = make_frame({"name", "pts", "avg", "ok"}, {ColumnType::Text, ColumnType::Integer, ColumnType::Real, ColumnType::Boolean},
                      {{std::string("Line\nbreak"), std::int64_t{10}, 0.5, true},
                       {std::string("\\N"), Null{}, 1.0, false},
                       {Null{}, std::int64_t{-3}, Null{}, Null{}}});
  auto bytes = canonical_bytes(f);
  auto back = parse_canonical(bytes);
  EXPECT_TRUE(same_content(f, back));
  EXPECT_EQ(canonical_bytes(back), bytes);
  // The literal text "\N" and a real NULL stay distinct.
  EXPECT_FALSE(is_null(back.rows[1][0]));
  EXPECT_TRUE(is_null(back.rows[2][0]));
}

TEST(Frame, ParseCanonicalRejectsRaggedRows) {
  EXPECT_THROW(parse_canonical("a:integer\x1f" "b:text\n1\n"), Error);
  EXPECT_THROW(parse_canonical("a:widget\n1\n"), Error);
}

TEST(Frame, ColumnIndexAndTextTable) {
  auto f = make_frame({"x", "y"}, {ColumnType::Integer, ColumnType::Text}, {{std::int64_t{1}, std::string("one")}});
  EXPECT_EQ(f.column_index("y"), 1u);
  EXPECT_FALSE(f.column_index("z"));
  auto text = render_text_table(f);
  EXPECT_NE(text.find("one"), std::string::npos);
}
