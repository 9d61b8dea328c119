#include "mocomp/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "mocomp/errors.hpp"

namespace mocomp {
namespace pt = boost::property_tree;

namespace {

Vec3 parse_triple(const std::string& text, const std::string& where) {
    std::istringstream in(text);
    Vec3 v;
    if (!(in >> v.x() >> v.y() >> v.z())) {
        throw Error(ErrorCode::ParseError, "expected three numbers in " + where, where);
    }
    std::string rest;
    if (in >> rest) {
        throw Error(ErrorCode::ParseError, "trailing characters in " + where, where);
    }
    return v;
}

double parse_number(const std::string& text, const std::string& where) {
    std::istringstream in(text);
    double v = 0.0;
    if (!(in >> v)) {
        throw Error(ErrorCode::ParseError, "expected a number in " + where, where);
    }
    return v;
}

std::string required_attr(const pt::ptree& node, const std::string& attr, const std::string& where) {
    auto value = node.get_optional<std::string>("<xmlattr>." + attr);
    if (!value || value->empty()) {
        throw Error(ErrorCode::ParseError, where + " is missing attribute '" + attr + "'", where);
    }
    return *value;
}

JointKind parse_kind(const std::string& type, const std::string& where) {
    if (type == "revolute") return JointKind::Revolute;
    if (type == "continuous") return JointKind::Continuous;
    if (type == "prismatic") return JointKind::Prismatic;
    if (type == "fixed") return JointKind::Fixed;
    throw Error(ErrorCode::UnsupportedJointType, "joint type '" + type + "' is not supported", where);
}

JointSpec parse_joint(const pt::ptree& node) {
    JointSpec joint;
    joint.name = required_attr(node, "name", "joint");
    const std::string where = "joint[" + joint.name + "]";
    joint.kind = parse_kind(required_attr(node, "type", where), where);

    if (node.get_child_optional("mimic")) {
        throw Error(ErrorCode::UnsupportedJointType, "mimic joints are not supported", where);
    }
    auto parent = node.get_child_optional("parent");
    auto child = node.get_child_optional("child");
    if (!parent || !child) {
        throw Error(ErrorCode::ParseError, where + " needs <parent> and <child>", where);
    }
    joint.parent_link = required_attr(*parent, "link", where + "/parent");
    joint.child_link = required_attr(*child, "link", where + "/child");

    if (auto origin = node.get_child_optional("origin")) {
        Vec3 xyz = Vec3::Zero();
        Vec3 rpy = Vec3::Zero();
        if (auto s = origin->get_optional<std::string>("<xmlattr>.xyz")) xyz = parse_triple(*s, where + "/origin@xyz");
        if (auto s = origin->get_optional<std::string>("<xmlattr>.rpy")) rpy = parse_triple(*s, where + "/origin@rpy");
        joint.origin = Pose::from_xyz_rpy(xyz, rpy);
    }
    if (auto axis = node.get_child_optional("axis")) {
        joint.axis = parse_triple(required_attr(*axis, "xyz", where + "/axis"), where + "/axis@xyz");
    }

    const bool needs_limits = joint.kind == JointKind::Revolute || joint.kind == JointKind::Prismatic;
    if (needs_limits) {
        auto limit = node.get_child_optional("limit");
        if (!limit) {
            throw Error(ErrorCode::ParseError, where + " requires a <limit> element", where);
        }
        JointLimits lim;
        // URDF defaults both bounds to 0 when omitted.
        if (auto s = limit->get_optional<std::string>("<xmlattr>.lower")) lim.lower = parse_number(*s, where + "/limit@lower");
        if (auto s = limit->get_optional<std::string>("<xmlattr>.upper")) lim.upper = parse_number(*s, where + "/limit@upper");
        joint.limits = lim;
    }
    return joint;
}

}  // namespace

const char* joint_kind_name(JointKind kind) {
    switch (kind) {
        case JointKind::Revolute: return "revolute";
        case JointKind::Continuous: return "continuous";
        case JointKind::Prismatic: return "prismatic";
        case JointKind::Fixed: return "fixed";
    }
    return "fixed";
}

const char* limit_side_name(LimitSide side) { return side == LimitSide::AtLower ? "at_lower" : "at_upper"; }

RobotModel RobotModel::build(std::string name, std::vector<std::string> links, std::vector<JointSpec> joints) {
    RobotModel model;
    model.name_ = std::move(name);
    model.links_ = std::move(links);
    model.joints_ = std::move(joints);

    if (model.links_.empty()) {
        throw Error(ErrorCode::SchemaError, "robot has no links");
    }
    std::unordered_map<std::string, std::size_t> link_index;
    for (std::size_t i = 0; i < model.links_.size(); ++i) {
        if (!link_index.emplace(model.links_[i], i).second) {
            throw Error(ErrorCode::SchemaError, "duplicate link '" + model.links_[i] + "'", model.links_[i]);
        }
    }

    std::set<std::string> joint_names;
    std::vector<int> parent_joint(model.links_.size(), -1);
    std::vector<std::vector<std::size_t>> children(model.links_.size());
    for (std::size_t j = 0; j < model.joints_.size(); ++j) {
        JointSpec& joint = model.joints_[j];
        if (!joint_names.insert(joint.name).second) {
            throw Error(ErrorCode::SchemaError, "duplicate joint '" + joint.name + "'", joint.name);
        }
        auto p = link_index.find(joint.parent_link);
        auto c = link_index.find(joint.child_link);
        if (p == link_index.end() || c == link_index.end()) {
            const std::string& missing = p == link_index.end() ? joint.parent_link : joint.child_link;
            throw Error(ErrorCode::DanglingLinkError, "joint '" + joint.name + "' references undeclared link '" + missing + "'",
                        joint.name);
        }
        if (parent_joint[c->second] != -1) {
            throw Error(ErrorCode::CycleError, "link '" + joint.child_link + "' has more than one parent joint",
                        joint.child_link);
        }
        parent_joint[c->second] = static_cast<int>(j);
        children[p->second].push_back(j);

        const double n = joint.axis.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw Error(ErrorCode::SchemaError, "joint '" + joint.name + "' has a zero axis", joint.name);
        }
        joint.axis /= n;
        if (joint.kind == JointKind::Continuous || joint.kind == JointKind::Fixed) {
            joint.limits.reset();
        } else if (!joint.limits) {
            throw Error(ErrorCode::SchemaError, "joint '" + joint.name + "' requires position limits", joint.name);
        } else if (joint.limits->lower > joint.limits->upper) {
            throw Error(ErrorCode::SchemaError, "joint '" + joint.name + "' has lower limit above upper", joint.name);
        }
    }

    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < model.links_.size(); ++i) {
        if (parent_joint[i] == -1) roots.push_back(i);
    }
    if (roots.empty()) {
        throw Error(ErrorCode::CycleError, "every link has a parent; the joints form a cycle");
    }
    if (roots.size() > 1) {
        throw Error(ErrorCode::DanglingLinkError,
                    "link '" + model.links_[roots[1]] + "' is not connected to root '" + model.links_[roots[0]] + "'",
                    model.links_[roots[1]]);
    }
    model.root_ = model.links_[roots.front()];

    std::deque<std::size_t> queue{roots.front()};
    std::vector<bool> reached(model.links_.size(), false);
    reached[roots.front()] = true;
    while (!queue.empty()) {
        const std::size_t link = queue.front();
        queue.pop_front();
        for (std::size_t j : children[link]) {
            model.order_.push_back(j);
            const std::size_t child = link_index.at(model.joints_[j].child_link);
            reached[child] = true;
            queue.push_back(child);
        }
    }
    for (std::size_t i = 0; i < model.links_.size(); ++i) {
        if (!reached[i]) {
            throw Error(ErrorCode::CycleError, "link '" + model.links_[i] + "' lies on a joint cycle", model.links_[i]);
        }
    }

    model.slot_.assign(model.joints_.size(), -1);
    for (std::size_t j = 0; j < model.joints_.size(); ++j) {
        if (model.joints_[j].kind != JointKind::Fixed) {
            model.slot_[j] = static_cast<int>(model.actuated_.size());
            model.actuated_.push_back(j);
            model.actuated_names_.push_back(model.joints_[j].name);
        }
    }
    return model;
}

bool RobotModel::has_link(std::string_view link) const {
    return std::find(links_.begin(), links_.end(), link) != links_.end();
}

std::optional<std::size_t> RobotModel::actuated_index(std::string_view joint) const {
    auto it = std::find(actuated_names_.begin(), actuated_names_.end(), joint);
    if (it == actuated_names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - actuated_names_.begin());
}

RobotModel parse_urdf(std::string_view document) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(document)};
        pt::read_xml(in, tree, pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed XML: ") + e.message(),
                    "line " + std::to_string(e.line()));
    }
    auto robot = tree.get_child_optional("robot");
    if (!robot) {
        throw Error(ErrorCode::ParseError, "document has no <robot> element", "robot");
    }
    std::string name = robot->get<std::string>("<xmlattr>.name", "");
    std::vector<std::string> links;
    std::vector<JointSpec> joints;
    for (const auto& [tag, node] : *robot) {
        if (tag == "link") {
            links.push_back(required_attr(node, "name", "link"));
        } else if (tag == "joint") {
            joints.push_back(parse_joint(node));
        }
    }
    return RobotModel::build(std::move(name), std::move(links), std::move(joints));
}

namespace {

Pose joint_motion(const JointSpec& joint, double value) {
    switch (joint.kind) {
        case JointKind::Revolute:
        case JointKind::Continuous:
            return {Vec3::Zero(), UnitQuaternion::from_axis_angle(joint.axis, value)};
        case JointKind::Prismatic:
            return {joint.axis * value, UnitQuaternion::identity()};
        case JointKind::Fixed:
            break;
    }
    return Pose::identity();
}

void require_dof(const RobotModel& model, std::span<const double> config) {
    if (config.size() != model.dof()) {
        throw Error(ErrorCode::DimensionMismatch, "configuration has " + std::to_string(config.size()) +
                                                      " values, robot '" + model.name() + "' has " +
                                                      std::to_string(model.dof()) + " actuated joints");
    }
}

}  // namespace

LinkPoses forward_kinematics(const RobotModel& model, std::span<const double> config) {
    require_dof(model, config);
    LinkPoses poses;
    poses.emplace(model.root_link(), Pose::identity());
    for (std::size_t j : model.traversal_order()) {
        const JointSpec& joint = model.joints()[j];
        const int slot = model.config_slot(j);
        const double value = slot >= 0 ? config[static_cast<std::size_t>(slot)] : 0.0;
        poses[joint.child_link] = poses.at(joint.parent_link) * joint.origin * joint_motion(joint, value);
    }
    return poses;
}

Pose link_pose(const RobotModel& model, std::span<const double> config, std::string_view link) {
    require_dof(model, config);
    if (!model.has_link(link)) {
        throw Error(ErrorCode::UnknownLink, "robot '" + model.name() + "' has no link '" + std::string(link) + "'",
                    std::string(link));
    }
    // walk up to the root, then compose downward
    std::vector<std::size_t> chain;
    std::string current(link);
    while (current != model.root_link()) {
        const auto& joints = model.joints();
        auto it = std::find_if(joints.begin(), joints.end(), [&](const JointSpec& j) { return j.child_link == current; });
        chain.push_back(static_cast<std::size_t>(it - joints.begin()));
        current = it->parent_link;
    }
    Pose pose = Pose::identity();
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const JointSpec& joint = model.joints()[*it];
        const int slot = model.config_slot(*it);
        const double value = slot >= 0 ? config[static_cast<std::size_t>(slot)] : 0.0;
        pose = pose * joint.origin * joint_motion(joint, value);
    }
    return pose;
}

JointTrajectory reorder_to_model(const RobotModel& model, const JointTrajectory& joints) {
    if (joints.joint_names == model.actuated_joints()) {
        return joints;
    }
    const auto& target = model.actuated_joints();
    std::vector<std::string> a = joints.joint_names;
    std::vector<std::string> b = target;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
        throw Error(ErrorCode::JointNameMismatch,
                    "trajectory joint names do not match the actuated joints of robot '" + model.name() + "'");
    }
    std::vector<std::size_t> source(target.size());
    for (std::size_t k = 0; k < target.size(); ++k) {
        source[k] = static_cast<std::size_t>(
            std::find(joints.joint_names.begin(), joints.joint_names.end(), target[k]) - joints.joint_names.begin());
    }
    JointTrajectory out;
    out.joint_names = target;
    out.timestamps = joints.timestamps;
    out.configurations.reserve(joints.size());
    for (const auto& q : joints.configurations) {
        Configuration r(target.size());
        for (std::size_t k = 0; k < target.size(); ++k) r[k] = q.at(source[k]);
        out.configurations.push_back(std::move(r));
    }
    return out;
}

PoseTrajectory link_pose_trajectory(const RobotModel& model, const JointTrajectory& joints, std::string_view link) {
    if (!model.has_link(link)) {
        throw Error(ErrorCode::UnknownLink, "robot '" + model.name() + "' has no link '" + std::string(link) + "'",
                    std::string(link));
    }
    const JointTrajectory ordered = reorder_to_model(model, joints);
    PoseTrajectory out;
    out.timestamps = ordered.timestamps;
    out.poses.reserve(ordered.size());
    for (const auto& q : ordered.configurations) {
        out.poses.push_back(link_pose(model, q, link));
    }
    return out;
}

std::vector<LimitViolation> joint_limit_violations(const RobotModel& model, const JointTrajectory& joints,
                                                   double margin) {
    if (!(margin >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "limit margin must be non-negative");
    }
    const JointTrajectory ordered = reorder_to_model(model, joints);
    std::vector<LimitViolation> out;
    for (std::size_t k = 0; k < model.dof(); ++k) {
        const JointSpec& joint = model.actuated_joint(k);
        if (!joint.limits) continue;
        for (LimitSide side : {LimitSide::AtLower, LimitSide::AtUpper}) {
            auto flagged = [&](std::size_t i) {
                const double v = ordered.configurations[i][k];
                return side == LimitSide::AtLower ? v <= joint.limits->lower + margin
                                                  : v >= joint.limits->upper - margin;
            };
            std::size_t i = 0;
            while (i < ordered.size()) {
                if (!flagged(i)) {
                    ++i;
                    continue;
                }
                std::size_t end = i;
                while (end + 1 < ordered.size() && flagged(end + 1)) ++end;
                out.push_back({joint.name, side, ordered.timestamps[i], ordered.timestamps[end]});
                i = end + 1;
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const LimitViolation& a, const LimitViolation& b) { return a.start < b.start; });
    return out;
}

}  // namespace mocomp
