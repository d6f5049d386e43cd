/** Minimal SVG chart builder: linear/log axes, lines, filled regions, markers. */

export interface Scale {
  (v: number): number;
  readonly domain: [number, number];
}

function linear(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  (f as { domain: [number, number] }).domain = domain;
  return f;
}

function log10(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  const [r0, r1] = range;
  const f = ((v: number) =>
    r0 + ((Math.log10(v) - l0) / span) * (r1 - r0)) as Scale;
  (f as { domain: [number, number] }).domain = domain;
  return f;
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

const fmt = (v: number) => {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
};

export interface ChartOptions {
  width?: number;
  height?: number;
  title: string;
  caption: string;
  xLabel: string;
  yLabel: string;
  xDomain: [number, number];
  yDomain: [number, number];
  yLog?: boolean;
}

export class Chart {
  private readonly body: string[] = [];
  private readonly legendEntries: { label: string; stroke: string; dash?: string }[] = [];
  readonly x: Scale;
  readonly y: Scale;
  private readonly w: number;
  private readonly h: number;
  private readonly m = { left: 70, right: 20, top: 40, bottom: 78 };
  private readonly opts: ChartOptions;

  constructor(opts: ChartOptions) {
    this.opts = opts;
    this.w = opts.width ?? 760;
    this.h = opts.height ?? 480;
    const xr: [number, number] = [this.m.left, this.w - this.m.right];
    const yr: [number, number] = [this.h - this.m.bottom, this.m.top];
    this.x = linear(opts.xDomain, xr);
    this.y = opts.yLog ? log10(opts.yDomain, yr) : linear(opts.yDomain, yr);
  }

  line(
    pts: [number, number][],
    stroke: string,
    opts: { width?: number; dash?: string; label?: string } = {},
  ): void {
    if (pts.length === 0) return;
    const d = pts
      .map((p) => `${this.x(p[0]).toFixed(2)},${this.y(p[1]).toFixed(2)}`)
      .join(" ");
    const dash = opts.dash ? ` stroke-dasharray="${opts.dash}"` : "";
    this.body.push(
      `<polyline points="${d}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${opts.width ?? 1.6}"${dash}/>`,
    );
    if (opts.label) {
      this.legendEntries.push({ label: opts.label, stroke, dash: opts.dash });
    }
  }

  /** Filled region between an upper and a lower sample sequence. */
  region(upper: [number, number][], lower: [number, number][], fill: string): void {
    if (upper.length === 0) return;
    const ring = [...upper, ...lower.slice().reverse()];
    const d = ring
      .map((p) => `${this.x(p[0]).toFixed(2)},${this.y(p[1]).toFixed(2)}`)
      .join(" ");
    this.body.push(
      `<polygon points="${d}" fill="${fill}" stroke="none" class="violation"/>`,
    );
  }

  marker(px: number, py: number, fill: string, r = 3.2): void {
    this.body.push(
      `<circle cx="${this.x(px).toFixed(2)}" cy="${this.y(py).toFixed(2)}" ` +
        `r="${r}" fill="${fill}"/>`,
    );
  }

  vline(px: number, stroke: string, label?: string): void {
    const xx = this.x(px).toFixed(2);
    this.body.push(
      `<line x1="${xx}" y1="${this.m.top}" x2="${xx}" ` +
        `y2="${this.h - this.m.bottom}" stroke="${stroke}" stroke-dasharray="2,3"/>`,
    );
    if (label) {
      this.body.push(
        `<text x="${Number(xx) + 4}" y="${this.m.top + 12}" font-size="11" ` +
          `fill="${stroke}">${esc(label)}</text>`,
      );
    }
  }

  hline(py: number, stroke: string, label?: string): void {
    const yy = this.y(py).toFixed(2);
    this.body.push(
      `<line x1="${this.m.left}" y1="${yy}" x2="${this.w - this.m.right}" ` +
        `y2="${yy}" stroke="${stroke}" stroke-dasharray="6,3"/>`,
    );
    if (label) {
      this.body.push(
        `<text x="${this.w - this.m.right - 4}" y="${Number(yy) - 5}" ` +
          `font-size="11" text-anchor="end" fill="${stroke}">${esc(label)}</text>`,
      );
    }
  }

  private axes(): string {
    const out: string[] = [];
    const x0 = this.m.left;
    const x1 = this.w - this.m.right;
    const y0 = this.h - this.m.bottom;
    const y1 = this.m.top;
    out.push(
      `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" ` +
        `fill="none" stroke="#444"/>`,
    );
    const [xa, xb] = this.x.domain;
    for (let i = 0; i <= 5; i++) {
      const v = xa + ((xb - xa) * i) / 5;
      const px = this.x(v);
      out.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="#444"/>`);
      out.push(
        `<text x="${px}" y="${y0 + 18}" font-size="11" text-anchor="middle">` +
          `${esc(fmt(v))}</text>`,
      );
    }
    const [ya, yb] = this.y.domain;
    const ticks: number[] = [];
    if (this.opts.yLog) {
      const lo = Math.ceil(Math.log10(ya));
      const hi = Math.floor(Math.log10(yb));
      for (let e = lo; e <= hi; e++) ticks.push(10 ** e);
      if (ticks.length < 2) ticks.push(ya, yb);
    } else {
      for (let i = 0; i <= 5; i++) ticks.push(ya + ((yb - ya) * i) / 5);
    }
    for (const v of ticks) {
      const py = this.y(v);
      out.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="#444"/>`);
      out.push(
        `<text x="${x0 - 8}" y="${py + 4}" font-size="11" text-anchor="end">` +
          `${esc(fmt(v))}</text>`,
      );
    }
    out.push(
      `<text x="${(x0 + x1) / 2}" y="${this.h - this.m.bottom + 36}" ` +
        `font-size="12" text-anchor="middle">${esc(this.opts.xLabel)}</text>`,
    );
    out.push(
      `<text x="16" y="${(y0 + y1) / 2}" font-size="12" text-anchor="middle" ` +
        `transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(this.opts.yLabel)}</text>`,
    );
    return out.join("\n");
  }

  private legend(): string {
    if (this.legendEntries.length === 0) return "";
    const out: string[] = [];
    let lx = this.m.left + 12;
    const ly = this.m.top + 14;
    for (const e of this.legendEntries) {
      const dash = e.dash ? ` stroke-dasharray="${e.dash}"` : "";
      out.push(
        `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" ` +
          `stroke="${e.stroke}" stroke-width="2"${dash}/>`,
      );
      out.push(
        `<text x="${lx + 27}" y="${ly + 4}" font-size="11">${esc(e.label)}</text>`,
      );
      lx += 34 + 7.2 * e.label.length;
    }
    return out.join("\n");
  }

  toString(): string {
    const caption =
      `<text x="${this.m.left}" y="${this.h - 22}" font-size="11" ` +
      `fill="#333" class="caption">${esc(this.opts.caption)}</text>`;
    const title =
      `<text x="${this.w / 2}" y="22" font-size="14" text-anchor="middle" ` +
      `font-weight="bold">${esc(this.opts.title)}</text>`;
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.w}" ` +
        `height="${this.h}" viewBox="0 0 ${this.w} ${this.h}" ` +
        `font-family="sans-serif">`,
      `<rect width="${this.w}" height="${this.h}" fill="white"/>`,
      title,
      this.axes(),
      this.body.join("\n"),
      this.legend(),
      caption,
      `</svg>`,
    ].join("\n");
  }
}

export function padDomain(lo: number, hi: number, frac = 0.06): [number, number] {
  if (lo === hi) return [lo - 1, hi + 1];
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}
