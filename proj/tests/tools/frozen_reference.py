#!/usr/bin/env python3
"""Independent reference values for the dynamics regression tests.

Computes, straight from the chain definition file with plain numpy (no
shared code with the C++ library):
  - forward kinematics of the sensor frame at the ready pose,
  - the joint-space inertia matrix via per-link energy Jacobians,
  - the gravity torque via central differences of the potential energy.

Run from the repository root:  python3 tests/tools/frozen_reference.py
The printed constants are frozen into tests/test_dynamics.cpp.
"""
import math
import re
import numpy as np

CHAIN = "config/panda_chain.cfg"
Q_READY = np.array([0.0, -math.pi / 4, 0.0, -3 * math.pi / 4, 0.0, math.pi / 2, math.pi / 4])


def parse_cfg(path):
    sections, cur = {}, None
    for line in open(path):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"\[(.+)\]", line)
        if m:
            cur = m.group(1)
            sections[cur] = {}
            continue
        k, v = [x.strip() for x in line.split("=", 1)]
        sections[cur][k] = [float(t) for t in v.split()]
    return sections


def rot_x(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def rot_z(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def frames(cfg, q):
    """Per-joint world rotation/origin/axis plus COM, and the sensor pose."""
    T = np.eye(4)
    out = []
    for i in range(7):
        link = cfg[f"link{i+1}"]
        a, d, alpha = link["a"][0], link["d"][0], link["alpha"][0]
        A = np.eye(4)
        A[:3, :3] = rot_x(alpha)
        A[:3, 3] = A[:3, :3] @ np.array([a, 0, 0])
        T = T @ A
        axis = T[:3, 2].copy()
        B = np.eye(4)
        B[:3, :3] = rot_z(q[i])
        B[:3, 3] = B[:3, :3] @ np.array([0, 0, d])
        T = T @ B
        com = T[:3, :3] @ np.array(link["com"]) + T[:3, 3]
        ixs = link["inertia"]
        I = np.array([[ixs[0], ixs[1], ixs[2]], [ixs[1], ixs[3], ixs[4]], [ixs[2], ixs[4], ixs[5]]])
        out.append(dict(R=T[:3, :3].copy(), p=T[:3, 3].copy(), z=axis, com=com,
                        mass=link["mass"][0], I=T[:3, :3] @ I @ T[:3, :3].T))
    mount = cfg["mount"]
    S = T.copy()
    S[:3, 3] += S[:3, :3] @ np.array([0, 0, mount["flange_d"][0]])
    S[:3, 3] += S[:3, :3] @ np.array(mount["translation"])
    rpy = mount.get("rpy", [0.0, 0.0, 0.0])
    rot_y = lambda a: np.array([[math.cos(a), 0, math.sin(a)], [0, 1, 0],
                                [-math.sin(a), 0, math.cos(a)]])
    S[:3, :3] = S[:3, :3] @ rot_z(rpy[2]) @ rot_y(rpy[1]) @ rot_x(rpy[0])
    return out, S


def mass_matrix(cfg, q):
    fr, _ = frames(cfg, q)
    M = np.zeros((7, 7))
    for k, link in enumerate(fr):
        Jv = np.zeros((3, 7))
        Jw = np.zeros((3, 7))
        for j in range(k + 1):
            Jv[:, j] = np.cross(fr[j]["z"], link["com"] - fr[j]["p"])
            Jw[:, j] = fr[j]["z"]
        M += link["mass"] * Jv.T @ Jv + Jw.T @ link["I"] @ Jw
    return M


def potential(cfg, q, g):
    fr, _ = frames(cfg, q)
    return -sum(l["mass"] * g @ l["com"] for l in fr)


def gravity_fd(cfg, q, g, h=1e-6):
    out = np.zeros(7)
    for j in range(7):
        qp, qm = q.copy(), q.copy()
        qp[j] += h
        qm[j] -= h
        out[j] = (potential(cfg, qp, g) - potential(cfg, qm, g)) / (2 * h)
    return out


def emit(name, arr):
    flat = np.asarray(arr).flatten()
    vals = ", ".join(f"{v:.15g}" for v in flat)
    print(f"const double {name}[] = {{{vals}}};")


if __name__ == "__main__":
    cfg = parse_cfg(CHAIN)
    g = np.array(cfg["chain"]["gravity"])
    fr, S = frames(cfg, Q_READY)
    print("// generated by tests/tools/frozen_reference.py")
    emit("kHomePosition", S[:3, 3])
    emit("kHomeRotation", S[:3, :3])
    emit("kHomeMass", mass_matrix(cfg, Q_READY))
    emit("kHomeGravity", gravity_fd(cfg, Q_READY, g))
