/**
 * Highlight palette. Index 0 is red: a document with a single answer is
 * highlighted in red, and further answers cycle through visually distinct
 * hues so original spans align with their translations by color.
 */

export const PALETTE = [
  "red",
  "blue",
  "green",
  "orange",
  "purple",
  "teal",
] as const;

export function colorName(index: number): string {
  const name = PALETTE[index % PALETTE.length];
  return name ?? "red";
}
