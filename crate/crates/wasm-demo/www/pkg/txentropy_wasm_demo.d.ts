/* tslint:disable */
/* eslint-disable */

/**
 * JSON summary of a pasted list of transaction values.
 */
export function indexReport(text: string): string;

/**
 * SVG chart of index against N for comma-separated λ values.
 */
export function lqreChartSvg(lambdas: string, n_max: number, points: number): string;

/**
 * Index values along the λ axis, flattened like [`lqre_curve_n`].
 */
export function lqreCurveLambda(n: number, lambda_max: number, points: number): Float64Array;

/**
 * Index values along the N axis; pairs are flattened as `[n0, h0, n1, h1, ...]`.
 */
export function lqreCurveN(lambda: number, n_max: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly indexReport: (a: number, b: number) => [number, number, number, number];
    readonly lqreChartSvg: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly lqreCurveLambda: (a: number, b: number, c: number) => [number, number, number, number];
    readonly lqreCurveN: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
