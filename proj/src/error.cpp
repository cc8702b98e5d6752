#include "golap/error.hpp"

namespace golap {

std::string_view to_string(ErrorCode code) {
   switch (code) {
      case ErrorCode::SyntaxError: return "SyntaxError";
      case ErrorCode::DuplicateName: return "DuplicateName";
      case ErrorCode::InvalidIdentifier: return "InvalidIdentifier";
      case ErrorCode::HierarchyNotPath: return "HierarchyNotPath";
      case ErrorCode::UnknownAttributeInHierarchy: return "UnknownAttributeInHierarchy";
      case ErrorCode::InvalidWeakAttribute: return "InvalidWeakAttribute";
      case ErrorCode::MissingHierarchy: return "MissingHierarchy";
      case ErrorCode::MissingMeasure: return "MissingMeasure";
      case ErrorCode::EmptyConstellation: return "EmptyConstellation";
      case ErrorCode::StarTargetMissing: return "StarTargetMissing";
      case ErrorCode::FactWithFewerThanTwoDimensions: return "FactWithFewerThanTwoDimensions";
      case ErrorCode::AttributeNotInHierarchy: return "AttributeNotInHierarchy";
      case ErrorCode::MissingColumn: return "MissingColumn";
      case ErrorCode::DanglingLink: return "DanglingLink";
      case ErrorCode::DuplicateId: return "DuplicateId";
      case ErrorCode::NonNumericMeasure: return "NonNumericMeasure";
      case ErrorCode::InvalidValue: return "InvalidValue";
      case ErrorCode::UnknownAttribute: return "UnknownAttribute";
      case ErrorCode::FileNotFound: return "FileNotFound";
      case ErrorCode::UnknownConstellation: return "UnknownConstellation";
      case ErrorCode::UnknownFact: return "UnknownFact";
      case ErrorCode::UnknownDimension: return "UnknownDimension";
      case ErrorCode::MeasureNotInFact: return "MeasureNotInFact";
      case ErrorCode::DimensionNotStarred: return "DimensionNotStarred";
      case ErrorCode::SameDimensionBothAxes: return "SameDimensionBothAxes";
      case ErrorCode::HierarchyNotInDimension: return "HierarchyNotInDimension";
      case ErrorCode::DimensionNotOnAxis: return "DimensionNotOnAxis";
      case ErrorCode::AxisCollision: return "AxisCollision";
      case ErrorCode::NotFinerLevel: return "NotFinerLevel";
      case ErrorCode::NotCoarserLevel: return "NotCoarserLevel";
      case ErrorCode::AttributeNotDisplayed: return "AttributeNotDisplayed";
      case ErrorCode::UnknownNestedAttribute: return "UnknownNestedAttribute";
      case ErrorCode::AlreadyNested: return "AlreadyNested";
      case ErrorCode::UnknownQualifier: return "UnknownQualifier";
      case ErrorCode::UnknownAttributeOrMeasure: return "UnknownAttributeOrMeasure";
      case ErrorCode::TypeMismatchInComparison: return "TypeMismatchInComparison";
      case ErrorCode::ValueNotInDomain: return "ValueNotInDomain";
      case ErrorCode::IncompatibleAggregate: return "IncompatibleAggregate";
      case ErrorCode::AlreadyPushed: return "AlreadyPushed";
      case ErrorCode::MeasureNotInSubject: return "MeasureNotInSubject";
      case ErrorCode::DuplicateMeasure: return "DuplicateMeasure";
      case ErrorCode::LastMeasure: return "LastMeasure";
      case ErrorCode::FactDoesNotShareAxes: return "FactDoesNotShareAxes";
      case ErrorCode::IncompatibleTarget: return "IncompatibleTarget";
      case ErrorCode::InvalidTable: return "InvalidTable";
      case ErrorCode::UnknownOperator: return "UnknownOperator";
      case ErrorCode::ArityError: return "ArityError";
      case ErrorCode::ArgumentError: return "ArgumentError";
      case ErrorCode::UnboundName: return "UnboundName";
      case ErrorCode::ServiceNotReady: return "ServiceNotReady";
      case ErrorCode::UnknownSession: return "UnknownSession";
      case ErrorCode::NothingToUndo: return "NothingToUndo";
   }
   return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
   : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

Error::Error(ErrorCode code, const std::string& message, SourceSpan span)
   : std::runtime_error(std::string(to_string(code)) + ": " + message + " (line " + std::to_string(span.line) +
                        ", column " + std::to_string(span.column) + ")"),
     code_(code), detail_(message), span_(span) {}

} // namespace golap
