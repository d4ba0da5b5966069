"""Grouped bar charts written directly as SVG text.

   Output depends only on the inputs, so identical datasets give byte-identical files.
"""
import dataclasses
import typing

COLORS = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948")


@dataclasses.dataclass(frozen=True)
class ChartStyle:
    width: int = 760
    height: int = 420
    margin_left: int = 90
    margin_right: int = 20
    margin_top: int = 40
    margin_bottom: int = 90
    group_gap: float = 18.0
    bar_gap: float = 2.0
    title: str = ""


def _esc(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def emit_svg_bars(
    dataset: typing.Sequence[typing.Tuple[str, str, float]], style: ChartStyle = ChartStyle()
) -> str:
    """Renders (category, series, value) triples as grouped bars, one group per category in
    first-seen order and one bar per series. Negative values hang below the zero line."""
    assert dataset, "Cannot chart an empty dataset"
    categories = list(dict.fromkeys(c for c, _, _ in dataset))
    series = list(dict.fromkeys(s for _, s, _ in dataset))
    values = {(c, s): float(v) for c, s, v in dataset}

    top = max(0.0, *values.values())
    bottom = min(0.0, *values.values())
    span = (top - bottom) or 1.0
    plot_left = style.margin_left
    plot_top = style.margin_top
    plot_width = style.width - style.margin_left - style.margin_right
    plot_height = style.height - style.margin_top - style.margin_bottom
    zero_y = plot_top + plot_height * top / span

    group_width = (plot_width - style.group_gap * (len(categories) - 1)) / len(categories)
    bar_width = (group_width - style.bar_gap * (len(series) - 1)) / len(series)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}" font-family="Arial" style="background:#ffffff">',
    ]
    if style.title:
        lines.append(f"<title>{_esc(style.title)}</title>")
        lines.append(f'<text x="{style.width / 2:.2f}" y="24" text-anchor="middle" font-size="15">{_esc(style.title)}</text>')
    lines.append(
        f'<line x1="{plot_left:.2f}" y1="{zero_y:.2f}" x2="{plot_left + plot_width:.2f}" y2="{zero_y:.2f}" stroke="#333333"/>'
    )
    for tick in (top, bottom):
        if tick:
            y = plot_top + plot_height * (top - tick) / span
            lines.append(f'<text x="{plot_left - 6:.2f}" y="{y + 4:.2f}" text-anchor="end" font-size="10">{tick:,.0f}</text>')

    for gi, category in enumerate(categories):
        x0 = plot_left + gi * (group_width + style.group_gap)
        for si, name in enumerate(series):
            if (category, name) not in values:
                continue
            value = values[(category, name)]
            x = x0 + si * (bar_width + style.bar_gap)
            height = plot_height * abs(value) / span
            y = zero_y - height if value >= 0 else zero_y
            lines.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_width:.2f}" height="{height:.2f}" '
                f'fill="{COLORS[si % len(COLORS)]}"><title>{_esc(category)} / {_esc(name)}: {value:,.0f}</title></rect>'
            )
        lines.append(
            f'<text x="{x0 + group_width / 2:.2f}" y="{plot_top + plot_height + 18:.2f}" '
            f'text-anchor="middle" font-size="10">{_esc(category)}</text>'
        )

    legend_y = style.height - 24
    for si, name in enumerate(series):
        lx = plot_left + si * 150
        lines.append(f'<circle cx="{lx + 5:.2f}" cy="{legend_y:.2f}" r="5" fill="{COLORS[si % len(COLORS)]}"/>')
        lines.append(f'<text x="{lx + 14:.2f}" y="{legend_y + 4:.2f}" font-size="11">{_esc(name)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
