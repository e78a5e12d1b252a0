"""Shared builders and checkers for the report test suite."""

import json
import re

RESIDUAL_HEADER = "t,u_l2,ohm_l2,f_perp_hs\n0.0,0.1,0.2,0.3\n"

FLOAT_TOKEN = re.compile(r"[^\s|,()\[\]]+")


def write_sweep_tree(
    root,
    eps=(0.2, 0.1, 0.05),
    orders=None,
    checks=None,
    schema_version="1",
    member_eps=None,
):
    """Minimal on-disk sweep artifact with the documented layout."""
    orders = orders if orders is not None else {"u_l2": 1.0}
    checks = (
        checks
        if checks is not None
        else {"h_tilde_monotone": True, "h_sup_ratio_max": 1.25}
    )
    member_eps = list(member_eps) if member_eps is not None else list(eps)
    members = []
    for i, (e, stored) in enumerate(zip(eps, member_eps)):
        name = f"member-{i:02d}"
        member_dir = root / name
        member_dir.mkdir(parents=True)
        (member_dir / "summary.json").write_text(
            json.dumps({"schema_version": schema_version, "kind": "run", "epsilon": stored})
        )
        (member_dir / "residuals.csv").write_text(RESIDUAL_HEADER)
        members.append({"epsilon": e, "dir": name, "config_hash": "0" * 64})
    report = {
        "schema_version": schema_version,
        "kind": "sweep",
        "config_hash": "0" * 64,
        "code_version": "0.0.0",
        "regime_tag": "nsf",
        "eps_values": list(eps),
        "members": members,
        "errors": {"u_l2": [e * 0.5 for e in eps]},
        "orders": orders,
        "checks": checks,
    }
    (root / "report.json").write_text(json.dumps(report))
    return report


def page_numbers(text):
    """Every token on the page that parses as a non-integer number."""
    # drop inline code spans first; hashes and directory names live there
    text = re.sub(r"`[^`]*`", "", text)
    found = []
    for token in FLOAT_TOKEN.findall(text):
        cleaned = token.strip(".,:;")
        if not ("." in cleaned or "e" in cleaned or "E" in cleaned):
            continue
        try:
            found.append(float(cleaned))
        except ValueError:
            continue
    return found


def collect_cells(node, out):
    if isinstance(node, bool):
        return
    if isinstance(node, (int, float)):
        out.add(float(node))
    elif isinstance(node, dict):
        for value in node.values():
            collect_cells(value, out)
    elif isinstance(node, (list, tuple)):
        for value in node:
            collect_cells(value, out)
