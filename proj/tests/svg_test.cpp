#include "mcgc/svg.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace mcgc;
namespace pt = boost::property_tree;

namespace {

pt::ptree parse(const std::string& svg) {
    std::istringstream in(svg);
    pt::ptree tree;
    pt::read_xml(in, tree);
    return tree;
}

std::vector<pt::ptree> group_children(const pt::ptree& tree, const std::string& id) {
    std::vector<pt::ptree> out;
    for (const auto& [name, node] : tree.get_child("svg")) {
        if (name != "g" || node.get<std::string>("<xmlattr>.id", "") != id) continue;
        for (const auto& [child_name, child] : node)
            if (child_name == "rect") out.push_back(child);
    }
    return out;
}

}  // namespace

TEST(Heatmap, TwoByTwoIsValidXml) {
    Matrix m(2, 2);
    m << 0.1, 0.9, 0.5, 0.3;
    HeatmapOptions opt;
    opt.labels = {"a<b", "c&d"};
    opt.title = "scores";
    const auto svg = heatmap_svg(m, opt);
    const auto tree = parse(svg);
    EXPECT_EQ(tree.get<std::string>("svg.<xmlattr>.version"), "1.1");
    EXPECT_EQ(group_children(tree, "cells").size(), 4u);
    EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
}

TEST(Heatmap, UniformMatrixHasUniformCells) {
    const auto tree = parse(heatmap_svg(Matrix::Constant(3, 3, 0.4)));
    std::set<std::string> fills;
    for (const auto& cell : group_children(tree, "cells")) fills.insert(cell.get<std::string>("<xmlattr>.fill"));
    EXPECT_EQ(fills.size(), 1u);
}

TEST(Heatmap, OverlayMarksDifferingCells) {
    AdjacencyMatrix a{(Matrix(2, 2) << 1, 0, 1, 1).finished()};
    AdjacencyMatrix b{(Matrix(2, 2) << 1, 1, 0, 1).finished()};
    HeatmapOptions opt;
    opt.overlay = difference_mask(a, b);
    const auto tree = parse(heatmap_svg(a.entries, opt));
    const auto marks = group_children(tree, "overlay");
    ASSERT_EQ(marks.size(), 2u);
    EXPECT_NE(marks[0].get<std::string>("<xmlattr>.stroke"), marks[1].get<std::string>("<xmlattr>.stroke"));
}

TEST(Heatmap, RejectsNonFinite) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(heatmap_svg(m), std::invalid_argument);
}

TEST(Heatmap, WritesFile) {
    const auto path = std::filesystem::temp_directory_path() / "mcgc_svg_test" / "h.svg";
    render_heatmap(Matrix::Identity(3, 3), path);
    EXPECT_NO_THROW(parse(read_text_file(path)));
    EXPECT_THROW(render_heatmap(Matrix::Identity(2, 2), "/proc/no/such/dir/x.svg"), std::exception);
}

TEST(LineChart, OnePolylinePerSeries) {
    LineSeries a{"AUROC", {0.1, 0.2, 0.3}, {0.9, 0.8, 0.85}, {0.01, 0.02, 0.0}};
    LineSeries b{"AUPRC & co", {0.1, 0.2, 0.3}, {0.7, 0.6, 0.65}, {}};
    LineChartOptions opt;
    opt.title = "sweep";
    opt.y_range = std::pair{0.0, 1.0};
    const auto tree = parse(line_chart_svg({a, b}, opt));
    EXPECT_EQ(tree.get<std::string>("svg.<xmlattr>.version"), "1.1");
    int lines = 0;
    for (const auto& [name, node] : tree.get_child("svg"))
        if (name == "g" && node.get<std::string>("<xmlattr>.id", "") == "series")
            for (const auto& [child, unused] : node) lines += child == "polyline";
    EXPECT_EQ(lines, 2);
}

TEST(LineChart, DegenerateAndInvalidInput) {
    EXPECT_NO_THROW(parse(line_chart_svg({{"flat", {1.0}, {2.0}, {}}})));
    EXPECT_NO_THROW(parse(line_chart_svg({})));
    EXPECT_THROW(line_chart_svg({{"bad", {1.0, 2.0}, {1.0}, {}}}), std::invalid_argument);
    EXPECT_THROW(line_chart_svg({{"nan", {1.0}, {std::nan("")}, {}}}), std::invalid_argument);
}
