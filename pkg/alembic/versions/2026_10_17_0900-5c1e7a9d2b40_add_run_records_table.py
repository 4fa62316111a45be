"""Add run records table

Revision ID: 5c1e7a9d2b40
Revises:
Create Date: 2026-10-17 09:00:00.000000

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision: str = '5c1e7a9d2b40'
down_revision: Union[str, Sequence[str], None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table('run_records',
    sa.Column('id', sa.String(), nullable=False),
    sa.Column('campaign_id', sa.String(), nullable=False),
    sa.Column('experiment', sa.String(), nullable=False),
    sa.Column('point', sa.Float(), nullable=True),
    sa.Column('algorithm', sa.String(), nullable=False),
    sa.Column('repetition', sa.Integer(), nullable=True),
    sa.Column('seed', sa.String(), nullable=False),
    sa.Column('tau', sa.Integer(), nullable=False),
    sa.Column('returned_arm', sa.Integer(), nullable=False),
    sa.Column('correct', sa.Boolean(), nullable=False),
    sa.Column('status', sa.String(), nullable=False),
    sa.Column('counts', sa.Text(), nullable=False),
    sa.Column('epsilon', sa.Float(), nullable=False),
    sa.Column('delta', sa.Float(), nullable=False),
    sa.Column('lam', sa.Float(), nullable=False),
    sa.Column('created_at', sa.DateTime(timezone=True), server_default=sa.text('(CURRENT_TIMESTAMP)'), nullable=True),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_run_records_campaign_id'), 'run_records', ['campaign_id'], unique=False)
    op.create_index(op.f('ix_run_records_algorithm'), 'run_records', ['algorithm'], unique=False)


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_index(op.f('ix_run_records_algorithm'), table_name='run_records')
    op.drop_index(op.f('ix_run_records_campaign_id'), table_name='run_records')
    op.drop_table('run_records')
