// Decoding of sized Verilog literals, for truth-table rendering of LUT
// configs in the detail pane.

const LITERAL = /^\s*(\d+)\s*'\s*([bBhH])\s*([0-9a-fA-F_]+)\s*$/;

export function decodeSizedLiteral(text: string): { width: number; value: bigint } {
    const m = LITERAL.exec(text);
    if (!m) throw new Error(`malformed sized literal: ${text}`);
    const width = parseInt(m[1], 10);
    const digits = m[3].replace(/_/g, "");
    const base = m[2].toLowerCase() === "b" ? 2n : 16n;
    let value = 0n;
    for (const ch of digits) {
        const digit = BigInt(parseInt(ch, 16));
        if (base === 2n && digit > 1n) throw new Error(`bad binary digit in ${text}`);
        value = value * base + digit;
    }
    if (value >> BigInt(width) !== 0n) throw new Error(`value does not fit: ${text}`);
    return { width, value };
}

export type TruthRow = { inputs: number[]; output: number };

/** Rows of a LUT truth table; inputs follow pinOrder, index bit 0 = pin 0. */
export function lutTruthRows(literal: string, pinOrder: string[]): TruthRow[] {
    const { width, value } = decodeSizedLiteral(literal);
    if (width !== 1 << pinOrder.length) {
        throw new Error(`config width ${width} does not match ${pinOrder.length} pins`);
    }
    const rows: TruthRow[] = [];
    for (let index = 0; index < width; index++) {
        const inputs = pinOrder.map((_, j) => (index >> j) & 1);
        const output = Number((value >> BigInt(index)) & 1n);
        rows.push({ inputs, output });
    }
    return rows;
}
