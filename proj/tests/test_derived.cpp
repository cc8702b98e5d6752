#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixture.hpp"

#include "golap/algebra.hpp"

using namespace golap;
using namespace golap::testing;

namespace {

using Labels = std::vector<std::string>;

ErrorCode fails(const std::string& text) {
   return error_of([&] { fx(text); });
}

bool same(const std::string& a, const std::string& b) { return tm_equal(fx(a), fx(b), fix1()); }

const char* kT3 = "DROTATE(T0, Fournisseurs, Societes, HGFr)";

std::string with(const std::string& pattern, const std::string& inner) {
   std::string out = pattern;
   out.replace(out.find("$"), 1, inner);
   return out;
}

} // namespace

TEST_CASE("HROTATE") {
   TM t = fx("HROTATE(T0, Fournisseurs, HZon)");
   CHECK(t.line.hierarchy == "HZon");
   CHECK(t.line.units == std::vector<DisplayUnit>{DisplayUnit::parameter("FOURNISSEURS", "Zone")});
   Grid g = grid(t);
   CHECK(row_labels(g) == Labels{"E", "O"});
   CHECK(cell(g, {"E"}, "2005") == "(170)");
   CHECK(cell(g, {"O"}, "2005") == "(50)");
   CHECK(same("HROTATE(T0, Fournisseurs, HZon)", "DROTATE(T0, Fournisseurs, Fournisseurs, HZon)"));
   CHECK(same("HROTATE(T0, Fournisseurs, HGeo)", "T0"));
   CHECK(same("HROTATE(DRILLDOWN(T0, Fournisseurs, Pays), Fournisseurs, HGeo)", "T0"));
   CHECK(fails("HROTATE(T0, Produits, HCat)") == ErrorCode::DimensionNotOnAxis);
   CHECK(fails("HROTATE(T0, Fournisseurs, HTps)") == ErrorCode::HierarchyNotInDimension);
}

TEST_CASE("PLOT") {
   TM t = fx("PLOT(DRILLDOWN(T0, Fournisseurs, Pays), Fournisseurs, Pays)");
   CHECK(t.line.units == std::vector<DisplayUnit>{DisplayUnit::parameter("FOURNISSEURS", "Pays")});
   CHECK(row_labels(grid(t)) == Labels{"Bresil", "Chine"});
   CHECK(same("PLOT(DRILLDOWN(T0, Fournisseurs, Pays), Fournisseurs, Pays)",
              "DRILLDOWN(ROLLUP(DRILLDOWN(T0, Fournisseurs, Pays), Fournisseurs, All), Fournisseurs, Pays)"));

   Grid cities = grid(fx(with("PLOT($, Societes, Ville)", kT3)));
   CHECK(row_labels(cities) == Labels{"Bordeaux", "Toulouse"});
   CHECK(cell(cities, {"Bordeaux"}, "2005") == "(70)");
   CHECK(cell(cities, {"Bordeaux"}, "2004") == "(30)");
   CHECK(cell(cities, {"Toulouse"}, "2005") == "(150)");
   CHECK(fails("PLOT(T0, Fournisseurs, Zone)") == ErrorCode::AttributeNotInHierarchy);
}

TEST_CASE("ORDER") {
   TM t = fx("ORDER(T0, Fournisseurs, Continent, dsc)");
   CHECK(t.domain_orders.at(AttributeKey{"FOURNISSEURS", "Continent"}) ==
         std::vector<Value>{std::string("Asie"), std::string("Amerique")});
   CHECK(same("ORDER(T0, Fournisseurs, Continent, dsc)", "SWITCH(T0, Fournisseurs, Continent, 'Amerique', 'Asie')"));
   CHECK(same("ORDER(T0, Fournisseurs, Continent, asc)", "T0"));
   CHECK(same("ORDER(ORDER(T0, Dates, Annee, asc), Dates, Annee, asc)", "ORDER(T0, Dates, Annee, asc)"));
   CHECK(same("ORDER(SWITCH(T0, Dates, Annee, 2004, 2005), Dates, Annee, asc)", "T0"));
   CHECK(column_labels(grid(fx("ORDER(T0, Dates, Annee, dsc)"))) == Labels{"2005", "2004"});
   CHECK(fails("ORDER(T0, Fournisseurs, Pays, asc)") == ErrorCode::AttributeNotDisplayed);
}

TEST_CASE("FROTATE") {
   TM t = fx(with("FROTATE($, Effectifs, {SUM(NbEmployes)})", kT3));
   CHECK(t.subject.fact == "EFFECTIFS");
   CHECK(t.measures() == std::vector<MeasureTerm>{MeasureTerm{AggFn::Sum, "NbEmployes"}});
   TM t3 = fx(kT3);
   CHECK(t.line.dimension == t3.line.dimension);
   CHECK(t.column.dimension == t3.column.dimension);
   std::set<std::string> axes{t.line.dimension, t.column.dimension};
   CHECK(axes == std::set<std::string>{"SOCIETES", "DATES"});
   Grid g = grid(t);
   CHECK(cell(g, {"Midi-Pyrenees"}, "2005") == "(200)");
   CHECK(cell(g, {"Aquitaine"}, "2005") == "(120)");

   CHECK(fails("FROTATE(T0, Effectifs, {SUM(NbEmployes)})") == ErrorCode::FactDoesNotShareAxes);
   CHECK(fails(with("FROTATE($, Effectifs, {SUM(Montant)})", kT3)) == ErrorCode::MeasureNotInFact);

   Algebra algebra(fix1());
   TM fresh = algebra.display(DisplaySpec{"SH_IMPORT", "Importations", {{AggFn::Sum, "Montant"}}, "Fournisseurs",
                                          "HGeo", "Dates", "HTps"});
   CHECK(tm_equal(algebra.frotate(fresh, FrotateOp{"IMPORTATIONS", {{AggFn::Max, "Quantite"}}}),
                  algebra.display(DisplaySpec{"SH_IMPORT", "Importations", {{AggFn::Max, "Quantite"}},
                                              "Fournisseurs", "HGeo", "Dates", "HTps"}),
                  fix1()));
}

TEST_CASE("FROTATE replays axis operations") {
   TM t = fx("FROTATE(SELECT(DRILLDOWN(DROTATE(T0, Fournisseurs, Societes, HGFr), Dates, Mois), Dates.Annee = 2005), "
             "Effectifs, {SUM(NbEmployes)})");
   CHECK(t.subject.fact == "EFFECTIFS");
   const AxisSpec* dates = t.axis_of("DATES");
   REQUIRE(dates);
   CHECK(dates->units.back() == DisplayUnit::parameter("DATES", "Mois"));
   CHECK(format_predicate(t.restriction) == "DATES.Annee = 2005");

   ReplayReport report;
   Algebra algebra(fix1());
   TM src = fx("PUSH(DRILLDOWN(DROTATE(T0, Fournisseurs, Societes, HGFr), Societes, Ville), Produits, Classe)");
   TM out = algebra.frotate(src, FrotateOp{"EFFECTIFS", {{AggFn::Sum, "NbEmployes"}}}, &report);
   CHECK(out.axis_of("SOCIETES")->units.back() == DisplayUnit::parameter("SOCIETES", "Ville"));
   REQUIRE(report.skipped.size() == 1);
   CHECK(report.skipped[0].find("DROTATE") != std::string::npos);
   CHECK(out.subject.entries.size() == 1);
}

TEST_CASE("UNSELECT") {
   CHECK(grid(fx("UNSELECT(SELECT(T0, Dates.Annee = 2005))")).cells == grid(fx("T0")).cells);
   CHECK(grid(fx("UNSELECT(T0)")).cells == grid(fx("T0")).cells);
   CHECK(same("UNSELECT(UNSELECT(T0))", "UNSELECT(T0)"));
   TM t = fx("UNSELECT(T0)");
   Algebra algebra(fix1());
   CHECK(t.restriction == algebra.unrestricted("IMPORTATIONS"));
   CHECK(t.restriction.clauses.size() == 5);
   CHECK(same("UNSELECT(SELECT(T0, Produits.Classe = 'Textile'))",
              "SELECT(T0, Importations.All = 'all' ∧ Produits.All = 'all' ∧ Dates.All = 'all' ∧ Societes.All = 'all' ∧ "
              "Fournisseurs.All = 'all')"));
}

TEST_CASE("HISTORY") {
   const char* fresh = "DISPLAY('SH_IMPORT', Importations, {SUM(Quantite)}, Produits, HCat, Dates, HTps)";
   TM t = fx(std::string("HISTORY(DRILLDOWN(T0, Dates, Mois), Dates, ") + fresh + ")");
   CHECK(t.column.units.back() == DisplayUnit::parameter("DATES", "Mois"));
   CHECK(t.line.dimension == "PRODUITS");

   CHECK(same(std::string("HISTORY(DRILLDOWN(T0, Dates, Mois), Produits, ") + fresh + ")", fresh));
   CHECK(fails("HISTORY(T0, Fournisseurs, DISPLAY('SH_IMPORT', Effectifs, {SUM(NbEmployes)}, Societes, HGFr, Dates, "
               "HTps))") == ErrorCode::IncompatibleTarget);

   Algebra algebra(fix1());
   ReplayReport report;
   TM src = fx("DRILLDOWN(T0, Fournisseurs, Pays)");
   TM target = fx("HROTATE(T0, Fournisseurs, HZon)");
   TM out = algebra.history(src, "FOURNISSEURS", target, &report);
   CHECK(report.skipped.size() == 1);
   CHECK(tm_equal(out, target, fix1()));
}
